#include "tablegan/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "tablegan/learners.hpp"

namespace tablegan {

namespace {

double unit_normalize(const ColumnSpec& col, double v) {
  if (col.kind == ColumnKind::categorical) {
    size_t c = col.categories.size();
    return c <= 1 ? 0.0 : v / static_cast<double>(c - 1);
  }
  return (v - col.min) / (col.max - col.min);
}

std::vector<int> subset_columns(const TableSchema& schema, DcrSubset subset) {
  std::vector<int> cols;
  for (int c = 0; c < schema.attribute_count(); ++c) {
    if (subset == DcrSubset::sensitive_only && schema.columns[c].is_qid) continue;
    cols.push_back(c);
  }
  return cols;
}

Eigen::MatrixXd normalized_subset(const RawTable& table, const TableSchema& norm_schema,
                                  const std::vector<int>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (size_t r = 0; r < table.rows.size(); ++r)
    for (size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = unit_normalize(
          norm_schema.columns[static_cast<size_t>(cols[j])], table.rows[r][cols[j]]);
  return out;
}

void require_same_schema(const RawTable& a, const RawTable& b, const char* what) {
  if (a.schema.hash() != b.schema.hash())
    throw InputError(std::string(what) + ": tables have different schemas");
}

std::string format_param(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(DcrSubset subset) {
  return subset == DcrSubset::qid_plus_sensitive ? "qid_plus_sensitive" : "sensitive_only";
}

DcrReport dcr(const RawTable& original, const RawTable& comparison, DcrSubset subset) {
  require_same_schema(original, comparison, "dcr");
  if (original.rows.empty() || comparison.rows.empty())
    throw InputError("dcr: both tables must be non-empty");
  std::vector<int> cols = subset_columns(original.schema, subset);
  if (cols.empty())
    throw InputError("dcr: subset '" + to_string(subset) + "' selects no columns");

  Eigen::MatrixXd a = normalized_subset(original, original.schema, cols);
  Eigen::MatrixXd b = normalized_subset(comparison, original.schema, cols);

  double sum = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double d2 = (a.row(i) - b.row(j)).squaredNorm();
      if (d2 < best) best = d2;
    }
    double d = std::sqrt(best);
    sum += d;
    sq += d * d;
  }
  double n = static_cast<double>(a.rows());
  DcrReport report;
  report.subset = subset;
  report.mean = sum / n;
  report.std = std::sqrt(std::max(0.0, sq / n - report.mean * report.mean));
  return report;
}

std::vector<ExhibitPair> nearest_real_exhibit(const RawTable& original,
                                              const RawTable& synthetic,
                                              size_t sample_size) {
  require_same_schema(original, synthetic, "nearest_real_exhibit");
  if (synthetic.rows.empty()) throw InputError("nearest_real_exhibit: empty synthetic table");
  std::vector<int> cols = subset_columns(original.schema, DcrSubset::qid_plus_sensitive);
  Eigen::MatrixXd a = normalized_subset(original, original.schema, cols);
  Eigen::MatrixXd b = normalized_subset(synthetic, original.schema, cols);

  size_t count = std::min(sample_size, original.rows.size());
  std::vector<ExhibitPair> pairs;
  pairs.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    size_t best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double d2 = (a.row(static_cast<Eigen::Index>(i)) - b.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        best_j = static_cast<size_t>(j);
      }
    }
    pairs.push_back({i, best_j, std::sqrt(best)});
  }
  return pairs;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InputError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double ks = 0.0;
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return std::min(1.0, std::max(ks, 0.0));
}

CdfReport cdf_compare(const RawTable& original, const RawTable& comparison,
                      const std::string& attribute) {
  int col = original.schema.index_of(attribute);
  if (col < 0 || comparison.schema.index_of(attribute) < 0)
    throw InputError("cdf_compare: unknown attribute '" + attribute + "'");
  CdfReport report;
  report.attribute = attribute;
  report.original_sorted.reserve(original.rows.size());
  for (const auto& row : original.rows) report.original_sorted.push_back(row[col]);
  int col_b = comparison.schema.index_of(attribute);
  report.comparison_sorted.reserve(comparison.rows.size());
  for (const auto& row : comparison.rows) report.comparison_sorted.push_back(row[col_b]);
  std::sort(report.original_sorted.begin(), report.original_sorted.end());
  std::sort(report.comparison_sorted.begin(), report.comparison_sorted.end());
  report.ks = ks_statistic(report.original_sorted, report.comparison_sorted);
  return report;
}

std::vector<RosterEntry> default_roster() {
  std::vector<RosterEntry> roster;
  for (int depth = 1; depth <= 10; ++depth)
    roster.push_back({LearnerKind::decision_tree, static_cast<double>(depth),
                      "depth=" + std::to_string(depth)});
  double lambda = 1e-4;
  for (int i = 0; i < 10; ++i) {
    roster.push_back({LearnerKind::ridge, lambda, "lambda=" + format_param(lambda)});
    lambda *= 10.0;
  }
  return roster;
}

Eigen::MatrixXd feature_matrix(const RawTable& table, const TableSchema& schema) {
  int label = schema.label_index();
  int m = schema.attribute_count();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.rows.size()), m - 1);
  for (size_t r = 0; r < table.rows.size(); ++r) {
    int j = 0;
    for (int c = 0; c < m; ++c) {
      if (c == label) continue;
      out(static_cast<Eigen::Index>(r), j++) =
          unit_normalize(schema.columns[static_cast<size_t>(c)], table.rows[r][c]);
    }
  }
  return out;
}

Eigen::VectorXd label_vector(const RawTable& table) {
  int label = table.schema.label_index();
  Eigen::VectorXd out(static_cast<Eigen::Index>(table.rows.size()));
  for (size_t r = 0; r < table.rows.size(); ++r)
    out(static_cast<Eigen::Index>(r)) = table.rows[r][label];
  return out;
}

namespace {

double score_learner(const RosterEntry& entry, TaskKind task, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y, const Eigen::MatrixXd& x_test,
                     const Eigen::VectorXd& y_test) {
  Eigen::VectorXd predictions;
  if (entry.kind == LearnerKind::decision_tree) {
    DecisionTree tree(static_cast<int>(entry.parameter), task == TaskKind::regression);
    tree.fit(x, y);
    predictions = tree.predict(x_test);
  } else {
    RidgeModel ridge(entry.parameter);
    ridge.fit(x, y);
    predictions = ridge.predict(x_test);
  }
  return task == TaskKind::classification ? f1_score(y_test, predictions)
                                          : mean_relative_error(y_test, predictions);
}

}  // namespace

std::vector<CompatPoint> model_compat(const RawTable& original_train,
                                      const RawTable& comparison_train,
                                      const RawTable& test, TaskKind task,
                                      const std::vector<RosterEntry>& roster) {
  require_same_schema(original_train, comparison_train, "model_compat");
  require_same_schema(original_train, test, "model_compat");
  if (original_train.rows.empty() || comparison_train.rows.empty() || test.rows.empty())
    throw InputError("model_compat: all tables must be non-empty");

  const ColumnSpec& label = original_train.schema.columns[original_train.schema.label_index()];
  if (task == TaskKind::classification && !label.label_is_binary)
    throw InputError("model_compat: classification requires a binary {0,1} label");
  if (task == TaskKind::regression && label.label_is_binary)
    throw InputError("model_compat: regression requires a continuous label");

  Eigen::VectorXd y_test = label_vector(test);
  if (task == TaskKind::classification) {
    double first = y_test(0);
    bool constant = true;
    for (Eigen::Index i = 1; i < y_test.size(); ++i)
      if (y_test(i) != first) {
        constant = false;
        break;
      }
    if (constant)
      throw InputError("model_compat: test set has a constant label, F-1 undefined");
  }

  const TableSchema& schema = original_train.schema;
  Eigen::MatrixXd x_orig = feature_matrix(original_train, schema);
  Eigen::VectorXd y_orig = label_vector(original_train);
  Eigen::MatrixXd x_comp = feature_matrix(comparison_train, schema);
  Eigen::VectorXd y_comp = label_vector(comparison_train);
  Eigen::MatrixXd x_test = feature_matrix(test, schema);

  std::vector<CompatPoint> points;
  points.reserve(roster.size());
  for (const auto& entry : roster) {
    CompatPoint point;
    point.algorithm = entry.kind == LearnerKind::decision_tree ? "decision_tree" : "ridge";
    point.parameter = entry.parameter_label;
    point.metric = task == TaskKind::classification ? CompatMetric::f1 : CompatMetric::mre;
    point.x = score_learner(entry, task, x_orig, y_orig, x_test, y_test);
    point.y = score_learner(entry, task, x_comp, y_comp, x_test, y_test);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace tablegan
