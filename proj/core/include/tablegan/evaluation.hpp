#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "tablegan/schema.hpp"

namespace tablegan {

enum class DcrSubset { qid_plus_sensitive, sensitive_only };

std::string to_string(DcrSubset subset);

/// Distance-to-closest-record summary: mean and population standard deviation
/// of each original record's distance to its nearest comparison record, after
/// attribute-wise [0,1] normalization with the original schema's ranges.
struct DcrReport {
  double mean = 0.0;
  double std = 0.0;
  DcrSubset subset = DcrSubset::qid_plus_sensitive;
};

DcrReport dcr(const RawTable& original, const RawTable& comparison, DcrSubset subset);

struct ExhibitPair {
  size_t original_row = 0;
  size_t synthetic_row = 0;
  double distance = 0.0;
};

/// Pairs the first `sample_size` original records with their nearest synthetic
/// record (same normalization as dcr) for human inspection.
std::vector<ExhibitPair> nearest_real_exhibit(const RawTable& original,
                                              const RawTable& synthetic,
                                              size_t sample_size);

/// Empirical CDFs of one attribute in both tables plus the two-sample
/// Kolmogorov-Smirnov statistic. Categorical attributes compare by their
/// index encoding.
struct CdfReport {
  std::string attribute;
  std::vector<double> original_sorted;
  std::vector<double> comparison_sorted;
  double ks = 0.0;
};

CdfReport cdf_compare(const RawTable& original, const RawTable& comparison,
                      const std::string& attribute);

/// Two-sample KS statistic on raw samples (exposed for reuse and testing).
double ks_statistic(std::vector<double> a, std::vector<double> b);

enum class TaskKind { classification, regression };
enum class CompatMetric { f1, mre };
enum class LearnerKind { decision_tree, ridge };

struct RosterEntry {
  LearnerKind kind = LearnerKind::decision_tree;
  double parameter = 0.0;  // tree depth or ridge lambda
  std::string parameter_label;
};

/// The published fixed roster: decision trees of depth 1..10 and ridge models
/// with lambda on a 10-step log grid from 1e-4 to 1e5. No parameter search.
std::vector<RosterEntry> default_roster();

struct CompatPoint {
  std::string algorithm;
  std::string parameter;
  double x = 0.0;  // score of the model trained on the original table
  double y = 0.0;  // score of the model trained on the comparison table
  CompatMetric metric = CompatMetric::f1;
};

/// Trains every roster entry twice (original vs comparison training table)
/// with identical parameters and scores both on the shared test set: F-1 for
/// classification, mean relative error for regression.
std::vector<CompatPoint> model_compat(const RawTable& original_train,
                                      const RawTable& comparison_train,
                                      const RawTable& test, TaskKind task,
                                      const std::vector<RosterEntry>& roster);

/// Feature matrix for the learners: all non-label columns normalized onto
/// [0,1] with `schema`'s ranges (categoricals by index).
Eigen::MatrixXd feature_matrix(const RawTable& table, const TableSchema& schema);
Eigen::VectorXd label_vector(const RawTable& table);

}  // namespace tablegan
