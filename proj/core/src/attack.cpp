#include "tablegan/attack.hpp"

#include <algorithm>
#include <cmath>

#include "tablegan/codec.hpp"

namespace tablegan {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int record_class(const RawTable& table, size_t row) {
  int label = table.schema.label_index();
  return table.rows[row][label] >= 0.5 ? 1 : 0;
}

void require_binary_label(const TableSchema& schema, const char* what) {
  int label = schema.label_index();
  if (label < 0 || !schema.columns[label].label_is_binary)
    throw InputError(std::string(what) + ": membership attack needs a binary label");
}

double macro_f1(double tp_in, double fp_in, double fn_in, double tp_out, double fp_out,
                double fn_out) {
  double d_in = 2.0 * tp_in + fp_in + fn_in;
  double d_out = 2.0 * tp_out + fp_out + fn_out;
  double f_in = d_in > 0.0 ? 2.0 * tp_in / d_in : 0.0;
  double f_out = d_out > 0.0 ? 2.0 * tp_out / d_out : 0.0;
  return 0.5 * (f_in + f_out);
}

// Best oriented threshold by macro-F1 over in/out, scanned via prefix counts.
ThresholdRule fit_threshold(std::span<const AttackSample> samples) {
  std::vector<std::pair<double, int>> sorted;  // (prob, is_in)
  sorted.reserve(samples.size());
  for (const auto& s : samples)
    sorted.emplace_back(s.d_probability, s.membership == Membership::in ? 1 : 0);
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  double total_in = 0.0;
  for (const auto& [p, is_in] : sorted) total_in += is_in;
  double total_out = static_cast<double>(n) - total_in;

  ThresholdRule best;
  double best_f1 = -1.0;
  // prefix_in[i]: 'in' samples among the first i
  double prefix_in = 0.0;
  for (size_t i = 0; i <= n; ++i) {
    bool boundary = i == 0 || i == n || sorted[i - 1].first != sorted[i].first;
    if (boundary) {
      double threshold;
      if (i == 0)
        threshold = sorted.empty() ? 0.0 : sorted[0].first - 1.0;
      else if (i == n)
        threshold = sorted[n - 1].first + 1.0;
      else
        threshold = 0.5 * (sorted[i - 1].first + sorted[i].first);

      double prefix_out = static_cast<double>(i) - prefix_in;
      // predict 'in' for p >= threshold (samples i..n)
      {
        double tp_in = total_in - prefix_in;
        double fp_in = total_out - prefix_out;
        double fn_in = prefix_in;
        double tp_out = prefix_out, fp_out = prefix_in, fn_out = total_out - prefix_out;
        double f1 = macro_f1(tp_in, fp_in, fn_in, tp_out, fp_out, fn_out);
        if (f1 > best_f1 + 1e-12) {
          best_f1 = f1;
          best = {threshold, true};
        }
      }
      // predict 'in' for p < threshold (samples 0..i)
      {
        double tp_in = prefix_in;
        double fp_in = prefix_out;
        double fn_in = total_in - prefix_in;
        double tp_out = total_out - prefix_out, fp_out = total_in - prefix_in,
               fn_out = prefix_out;
        double f1 = macro_f1(tp_in, fp_in, fn_in, tp_out, fp_out, fn_out);
        if (f1 > best_f1 + 1e-12) {
          best_f1 = f1;
          best = {threshold, false};
        }
      }
    }
    if (i < n) prefix_in += sorted[i].second;
  }
  return best;
}

DecisionTree fit_tree(std::span<const AttackSample> samples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (size_t i = 0; i < samples.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = samples[i].d_probability;
    y(static_cast<Eigen::Index>(i)) = samples[i].membership == Membership::in ? 1.0 : 0.0;
  }
  DecisionTree tree(3, false);
  tree.fit(x, y);
  return tree;
}

template <typename Model>
double eval_macro_f1(const Model& model, std::span<const AttackSample> samples) {
  double tp_in = 0, fp_in = 0, fn_in = 0, tp_out = 0, fp_out = 0, fn_out = 0;
  for (const auto& s : samples) {
    bool is_in = s.membership == Membership::in;
    bool predicted_in = model.predict_in(s.d_probability);
    if (predicted_in && is_in) ++tp_in;
    if (predicted_in && !is_in) ++fp_in;
    if (!predicted_in && is_in) ++fn_in;
    if (!predicted_in && !is_in) ++tp_out;
    if (is_in && !predicted_in) ++fp_out;
    if (!is_in && predicted_in) ++fn_out;
  }
  return macro_f1(tp_in, fp_in, fn_in, tp_out, fp_out, fn_out);
}

struct TreeAdapter {
  const DecisionTree* tree;
  bool predict_in(double p) const {
    Eigen::RowVectorXd x(1);
    x(0) = p;
    return tree->predict(x) >= 0.5;
  }
};

// 10-fold cross-validated macro-F1 for one model kind.
double cv_f1(std::span<const AttackSample> samples, ClassAttackModel::Kind kind) {
  constexpr int kFolds = 10;
  double total = 0.0;
  int used = 0;
  for (int fold = 0; fold < kFolds; ++fold) {
    std::vector<AttackSample> train, valid;
    for (size_t i = 0; i < samples.size(); ++i) {
      if (static_cast<int>(i % kFolds) == fold)
        valid.push_back(samples[i]);
      else
        train.push_back(samples[i]);
    }
    bool train_has_both = false, train_has_in = false, train_has_out = false;
    for (const auto& s : train) {
      (s.membership == Membership::in ? train_has_in : train_has_out) = true;
      train_has_both = train_has_in && train_has_out;
    }
    if (valid.empty() || !train_has_both) continue;
    if (kind == ClassAttackModel::Kind::threshold) {
      ThresholdRule rule = fit_threshold(train);
      total += eval_macro_f1(rule, valid);
    } else {
      DecisionTree tree = fit_tree(train);
      total += eval_macro_f1(TreeAdapter{&tree}, valid);
    }
    ++used;
  }
  return used > 0 ? total / used : 0.0;
}

}  // namespace

std::string to_string(FeatureSource source) {
  return source == FeatureSource::target_discriminator ? "target_discriminator"
                                                       : "shadow_ensemble";
}

double ClassAttackModel::in_score(double p) const {
  if (kind == Kind::threshold) return rule.in_score(p);
  Eigen::RowVectorXd x(1);
  x(0) = p;
  return tree.predict(x);
}

bool ClassAttackModel::predict_in(double p) const {
  if (kind == Kind::threshold) return rule.predict_in(p);
  Eigen::RowVectorXd x(1);
  x(0) = p;
  return tree.predict(x) >= 0.5;
}

Eigen::VectorXd discriminator_probs(TrainedModel& model, const RawTable& table) {
  if (model.schema.hash() != table.schema.hash())
    throw InputError("discriminator_probs: table schema does not match the model");
  MatrixBatch encoded = encode_table(table, model.layout);
  return discriminate(model.nets.discriminator, encoded).probabilities;
}

std::vector<RawTable> build_shadow_corpora(TrainedModel& target, int shadow_count,
                                           size_t rows_per_shadow, uint64_t seed) {
  if (shadow_count < 1) throw InputError("shadow count must be >= 1");
  std::vector<RawTable> corpora;
  corpora.reserve(static_cast<size_t>(shadow_count));
  for (int i = 0; i < shadow_count; ++i)
    corpora.push_back(
        synthesize(target, rows_per_shadow, mix_seed(seed, static_cast<uint64_t>(i))));
  return corpora;
}

std::vector<TrainedModel> train_shadows(std::span<const RawTable> corpora,
                                        const TrainConfig& cfg) {
  std::vector<TrainedModel> shadows;
  shadows.reserve(corpora.size());
  for (size_t i = 0; i < corpora.size(); ++i) {
    TrainConfig shadow_cfg = cfg;
    shadow_cfg.seed = mix_seed(cfg.seed, 0x5a5a5a5aULL + i);
    shadows.push_back(train(corpora[i], shadow_cfg));
  }
  return shadows;
}

std::vector<AttackSample> make_attack_samples(TrainedModel& shadow,
                                              const RawTable& in_records,
                                              const RawTable& out_records) {
  require_binary_label(shadow.schema, "make_attack_samples");
  if (shadow.schema.hash() != in_records.schema.hash() ||
      shadow.schema.hash() != out_records.schema.hash())
    throw InputError("make_attack_samples: schema mismatch");

  std::vector<AttackSample> samples;
  samples.reserve(in_records.rows.size() + out_records.rows.size());
  Eigen::VectorXd p_in = discriminator_probs(shadow, in_records);
  for (size_t i = 0; i < in_records.rows.size(); ++i)
    samples.push_back({record_class(in_records, i), p_in(static_cast<Eigen::Index>(i)),
                       Membership::in});
  Eigen::VectorXd p_out = discriminator_probs(shadow, out_records);
  for (size_t i = 0; i < out_records.rows.size(); ++i)
    samples.push_back({record_class(out_records, i), p_out(static_cast<Eigen::Index>(i)),
                       Membership::out});
  return samples;
}

AttackModel train_attack_models(std::span<const AttackSample> samples) {
  if (samples.empty()) throw InputError("train_attack_models: no samples");
  std::map<int, std::vector<AttackSample>> by_class;
  for (const auto& s : samples) by_class[s.class_value].push_back(s);

  AttackModel model;
  for (auto& [class_value, class_samples] : by_class) {
    bool has_in = false, has_out = false;
    for (const auto& s : class_samples)
      (s.membership == Membership::in ? has_in : has_out) = true;
    if (!has_in || !has_out)
      throw InputError("train_attack_models: class " + std::to_string(class_value) +
                       " has samples of only one membership value");
    double threshold_cv = cv_f1(class_samples, ClassAttackModel::Kind::threshold);
    double tree_cv = cv_f1(class_samples, ClassAttackModel::Kind::tree);
    ClassAttackModel cam;
    if (tree_cv > threshold_cv + 1e-12) {
      cam.kind = ClassAttackModel::Kind::tree;
      cam.tree = fit_tree(class_samples);
    } else {
      cam.kind = ClassAttackModel::Kind::threshold;
      cam.rule = fit_threshold(class_samples);
    }
    model.per_class.emplace(class_value, std::move(cam));
  }
  return model;
}

AttackReport attack_eval(const AttackModel& model, TrainedModel& target,
                         const RawTable& in_test, const RawTable& out_test,
                         FeatureSource source, std::span<TrainedModel> shadows) {
  require_binary_label(target.schema, "attack_eval");
  if (in_test.rows.size() != out_test.rows.size())
    throw InputError("attack_eval: evaluation set must be balanced 50/50 in/out (" +
                     std::to_string(in_test.rows.size()) + " vs " +
                     std::to_string(out_test.rows.size()) + ")");
  if (in_test.rows.empty()) throw InputError("attack_eval: empty evaluation set");
  if (source == FeatureSource::shadow_ensemble && shadows.empty())
    throw InputError("attack_eval: shadow_ensemble mode needs shadow models");

  auto probs_for = [&](const RawTable& table) {
    if (source == FeatureSource::target_discriminator)
      return discriminator_probs(target, table);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.rows.size()));
    for (auto& shadow : shadows) acc += discriminator_probs(shadow, table);
    return Eigen::VectorXd((acc / static_cast<double>(shadows.size())).eval());
  };
  Eigen::VectorXd p_in = probs_for(in_test);
  Eigen::VectorXd p_out = probs_for(out_test);

  AttackReport report;
  report.privacy = target.config.privacy;
  report.source = source;

  std::map<int, std::pair<std::vector<double>, std::vector<double>>> scores;  // in,out
  for (size_t i = 0; i < in_test.rows.size(); ++i)
    scores[record_class(in_test, i)].first.push_back(p_in(static_cast<Eigen::Index>(i)));
  for (size_t i = 0; i < out_test.rows.size(); ++i)
    scores[record_class(out_test, i)].second.push_back(p_out(static_cast<Eigen::Index>(i)));

  for (auto& [class_value, in_out] : scores) {
    auto& [in_probs, out_probs] = in_out;
    if (in_probs.empty() || out_probs.empty())
      throw InputError("attack_eval: class " + std::to_string(class_value) +
                       " is empty on one membership side");
    auto it = model.per_class.find(class_value);
    if (it == model.per_class.end())
      throw InputError("attack_eval: no attack model for class " +
                       std::to_string(class_value));
    const ClassAttackModel& cam = it->second;

    double tp_in = 0, fp_in = 0, fn_in = 0, tp_out = 0, fp_out = 0, fn_out = 0;
    std::vector<double> in_scores, out_scores;
    for (double p : in_probs) {
      in_scores.push_back(cam.in_score(p));
      if (cam.predict_in(p))
        ++tp_in;
      else {
        ++fn_in;
        ++fp_out;
      }
    }
    for (double p : out_probs) {
      out_scores.push_back(cam.in_score(p));
      if (cam.predict_in(p)) {
        ++fp_in;
        ++fn_out;
      } else {
        ++tp_out;
      }
    }
    AttackClassReport cls;
    cls.class_value = class_value;
    cls.in_count = in_probs.size();
    cls.out_count = out_probs.size();
    cls.f1 = macro_f1(tp_in, fp_in, fn_in, tp_out, fp_out, fn_out);
    cls.aucroc = auc_score(in_scores, out_scores);
    report.per_class.push_back(cls);
  }

  for (const auto& cls : report.per_class) {
    report.f1 += cls.f1;
    report.aucroc += cls.aucroc;
  }
  report.f1 /= static_cast<double>(report.per_class.size());
  report.aucroc /= static_cast<double>(report.per_class.size());
  return report;
}

}  // namespace tablegan
