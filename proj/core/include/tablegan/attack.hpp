#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tablegan/learners.hpp"
#include "tablegan/trainer.hpp"

namespace tablegan {

enum class Membership { in, out };
enum class FeatureSource { target_discriminator, shadow_ensemble };

std::string to_string(FeatureSource source);

/// One attack training sample: the record's class, the discriminator's
/// probability for it, and whether it was in the discriminator's training set.
struct AttackSample {
  int class_value = 0;
  double d_probability = 0.0;
  Membership membership = Membership::out;
};

/// Oriented threshold rule on the discriminator probability.
struct ThresholdRule {
  double threshold = 0.5;
  bool in_above = true;  // predict 'in' when p >= threshold

  double in_score(double p) const { return in_above ? p : -p; }
  bool predict_in(double p) const { return in_above ? p >= threshold : p < threshold; }
};

/// Per-class attack classifier: the better of a threshold rule and a
/// depth-bounded tree under 10-fold cross-validated F-1.
struct ClassAttackModel {
  enum class Kind { threshold, tree } kind = Kind::threshold;
  ThresholdRule rule;
  DecisionTree tree{3, false};

  double in_score(double p) const;
  bool predict_in(double p) const;
};

struct AttackModel {
  std::map<int, ClassAttackModel> per_class;
};

struct AttackClassReport {
  int class_value = 0;
  double f1 = 0.0;      // macro over in/out
  double aucroc = 0.0;  // 'in' as the positive class
  size_t in_count = 0, out_count = 0;
};

struct AttackReport {
  double f1 = 0.0;      // averaged over classes
  double aucroc = 0.0;  // averaged over classes
  std::vector<AttackClassReport> per_class;
  PrivacyConfig privacy;
  FeatureSource source = FeatureSource::target_discriminator;
};

/// Step 2 of the attack: query only the target's generator for `shadow_count`
/// synthetic tables of `rows_per_shadow` records each.
std::vector<RawTable> build_shadow_corpora(TrainedModel& target, int shadow_count,
                                           size_t rows_per_shadow, uint64_t seed);

/// Step 3: train one shadow table-GAN per corpus with the target's
/// architecture and config (per-shadow seeds derive from cfg.seed).
std::vector<TrainedModel> train_shadows(std::span<const RawTable> corpora,
                                        const TrainConfig& cfg);

/// Steps 4a-4b: (class, D(record), in/out) samples from one shadow model.
/// `in_records` must be the shadow's own training table; `out_records` real
/// records never used to train the target.
std::vector<AttackSample> make_attack_samples(TrainedModel& shadow,
                                              const RawTable& in_records,
                                              const RawTable& out_records);

/// Step 6: one binary classifier per observed class value.
AttackModel train_attack_models(std::span<const AttackSample> samples);

/// Evaluates the attack on a balanced in/out set. The per-record probability
/// comes from the chosen source; shadow_ensemble averages the shadow
/// discriminators and never touches the target's discriminator.
AttackReport attack_eval(const AttackModel& model, TrainedModel& target,
                         const RawTable& in_test, const RawTable& out_test,
                         FeatureSource source,
                         std::span<TrainedModel> shadows = {});

/// Discriminator probability for every record of the table (external query).
Eigen::VectorXd discriminator_probs(TrainedModel& model, const RawTable& table);

}  // namespace tablegan
