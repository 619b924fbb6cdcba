#include "tablegan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace tablegan {

void TrainConfig::validate() const {
  if (epochs < 1) throw InputError("epochs must be >= 1");
  if (batch_size < 2) throw InputError("batch size must be >= 2 (batch normalization)");
  if (!(ewma_weight > 0.0 && ewma_weight < 1.0))
    throw InputError("EWMA weight must lie in (0,1)");
  if (learning_rate <= 0.0) throw InputError("learning rate must be positive");
  if (privacy.delta_mean < 0.0 || privacy.delta_sd < 0.0)
    throw InputError("privacy thresholds must be non-negative");
  if (latent_dim < 1) throw InputError("latent dimension must be >= 1");
  if (base_filters < 1) throw InputError("base filter count must be >= 1");
  for (double w : loss_weights)
    if (!std::isfinite(w)) throw InputError("loss weights must be finite");
}

EwmaState EwmaState::zeros(int feature_dim) {
  EwmaState s;
  s.f_mean_x = Eigen::VectorXd::Zero(feature_dim);
  s.f_sd_x = Eigen::VectorXd::Zero(feature_dim);
  s.f_mean_z = Eigen::VectorXd::Zero(feature_dim);
  s.f_sd_z = Eigen::VectorXd::Zero(feature_dim);
  return s;
}

Eigen::VectorXd ewma_update(const Eigen::VectorXd& state,
                            const Eigen::VectorXd& batch_stat, double w) {
  if (state.size() != batch_stat.size())
    throw InputError("ewma_update: dimension mismatch");
  return w * state + (1.0 - w) * batch_stat;
}

namespace {

Eigen::VectorXd probs_to_vector(const Tensor& t) {
  Eigen::VectorXd out(t.n);
  for (int i = 0; i < t.n; ++i) out(i) = t.v[static_cast<size_t>(i)];
  return out;
}

Eigen::MatrixXd features_to_matrix(const Tensor& t) {
  Eigen::MatrixXd out(t.n, t.c);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.c; ++j) out(i, j) = t.v[static_cast<size_t>(i) * t.c + j];
  return out;
}

void mask_label_cell(Tensor& x, int label_index) {
  size_t cells = static_cast<size_t>(x.h) * x.w;
  for (int i = 0; i < x.n; ++i) x.v[i * cells + static_cast<size_t>(label_index)] = 0.0;
}

Eigen::VectorXd label_cells(const Tensor& x, int label_index) {
  size_t cells = static_cast<size_t>(x.h) * x.w;
  Eigen::VectorXd out(x.n);
  for (int i = 0; i < x.n; ++i)
    out(i) = (x.v[i * cells + static_cast<size_t>(label_index)] + 1.0) / 2.0;
  return out;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// d(class loss)/d(prediction) and /d(label), per sample, unweighted.
void class_loss_grads(const Eigen::VectorXd& labels, const Eigen::VectorXd& preds,
                      ClassLossMode mode, Eigen::VectorXd& d_pred,
                      Eigen::VectorXd& d_label) {
  const double n = static_cast<double>(labels.size());
  d_pred.resize(labels.size());
  d_label.resize(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (mode == ClassLossMode::absolute) {
      double s = sign_of(labels(i) - preds(i));
      d_pred(i) = -s / n;
      d_label(i) = s / n;
    } else {
      d_pred(i) = (-labels(i) / (preds(i) + kLogEpsilon) +
                   (1.0 - labels(i)) / (1.0 - preds(i) + kLogEpsilon)) /
                  n;
      d_label(i) = (-std::log(preds(i) + kLogEpsilon) +
                    std::log(1.0 - preds(i) + kLogEpsilon)) /
                   n;
    }
  }
}

double class_loss_value(const Eigen::VectorXd& labels, const Eigen::VectorXd& preds,
                        ClassLossMode mode) {
  return mode == ClassLossMode::absolute ? class_loss(labels, preds)
                                         : class_loss_cross_entropy(labels, preds);
}

}  // namespace

double generator_composite_loss(Networks& nets, const Tensor& z,
                                const BatchFeatureStats& real_stats,
                                const EwmaState& state_before, const TrainConfig& cfg,
                                const TableSchema& schema, const MatrixLayout& layout,
                                bool accumulate_grads, LossValues* parts,
                                BatchFeatureStats* fake_stats_out) {
  (void)layout;
  const double w = cfg.ewma_weight;
  const double w1 = cfg.loss_weights[0];
  const double w2 = cfg.loss_weights[1];
  const double w3 = cfg.loss_weights[2];
  const int n = z.n;
  const int label_index = schema.label_index();

  Tensor xf = nets.generator.forward(z, NetMode::train);
  auto [pf_t, ff_t] = nets.discriminator.forward(xf, NetMode::train);
  Eigen::VectorXd pf = probs_to_vector(pf_t);
  Eigen::MatrixXd feats = features_to_matrix(ff_t);
  BatchFeatureStats fake_stats = feature_stats(feats);
  if (fake_stats_out) *fake_stats_out = fake_stats;

  BatchFeatureStats x_used{ewma_update(state_before.f_mean_x, real_stats.mean, w),
                           ewma_update(state_before.f_sd_x, real_stats.sd, w)};
  BatchFeatureStats z_used{ewma_update(state_before.f_mean_z, fake_stats.mean, w),
                           ewma_update(state_before.f_sd_z, fake_stats.sd, w)};
  InfoLossResult info = info_loss(x_used, z_used, cfg.privacy);

  double g_orig = orig_loss_g(pf, cfg.generator_loss_mode);

  Eigen::VectorXd labels_f = label_cells(xf, label_index);
  Tensor xm = xf;
  mask_label_cell(xm, label_index);
  auto [cp_t, cf_t] = nets.classifier.forward(xm, NetMode::train);
  Eigen::VectorXd cp = probs_to_vector(cp_t);
  double g_class = class_loss_value(labels_f, cp, cfg.class_loss_mode);

  double total = w1 * g_orig + w2 * info.g_info + w3 * g_class;
  if (parts) {
    parts->g_orig = g_orig;
    parts->l_mean = info.l_mean;
    parts->l_sd = info.l_sd;
    parts->g_info = info.g_info;
    parts->g_class = g_class;
  }
  if (!accumulate_grads) return total;

  // --- adversarial term through the discriminator probability head
  Tensor dprob(n, 1, 1, 1);
  for (int i = 0; i < n; ++i) {
    double g;
    if (cfg.generator_loss_mode == GeneratorLossMode::literal)
      g = -1.0 / (n * (1.0 - pf(i) + kLogEpsilon));
    else
      g = -1.0 / (n * (pf(i) + kLogEpsilon));
    dprob.v[static_cast<size_t>(i)] = w1 * g;
  }

  // --- information term through the discriminator features; only the current
  // batch's statistics carry gradient (weight 1-w), the historical state is a
  // constant.
  Tensor dfeat(n, ff_t.c, 1, 1);
  if (w2 != 0.0) {
    const int dim = ff_t.c;
    if (info.l_mean > cfg.privacy.delta_mean && info.l_mean > 0.0) {
      Eigen::VectorXd dmu =
          -(x_used.mean - z_used.mean) / info.l_mean * ((1.0 - w) * w2 / n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j)
          dfeat.v[static_cast<size_t>(i) * dim + j] += dmu(j);
    }
    if (info.l_sd > cfg.privacy.delta_sd && info.l_sd > 0.0) {
      Eigen::VectorXd dsd = -(x_used.sd - z_used.sd) / info.l_sd * ((1.0 - w) * w2);
      for (int j = 0; j < dim; ++j) {
        double s = fake_stats.sd(j);
        if (s <= 0.0) continue;
        double c = dsd(j) / (n * s);
        for (int i = 0; i < n; ++i)
          dfeat.v[static_cast<size_t>(i) * dim + j] += c * (feats(i, j) - fake_stats.mean(j));
      }
    }
  }
  Tensor dxf = nets.discriminator.backward(dprob, dfeat);

  // --- classification term: through the classifier on the masked batch and
  // directly through the label cell.
  Eigen::VectorXd d_pred, d_label;
  class_loss_grads(labels_f, cp, cfg.class_loss_mode, d_pred, d_label);
  Tensor dcp(n, 1, 1, 1);
  for (int i = 0; i < n; ++i) dcp.v[static_cast<size_t>(i)] = w3 * d_pred(i);
  Tensor dxm = nets.classifier.backward_prob_only(dcp);
  mask_label_cell(dxm, label_index);  // masked cell passes no gradient
  size_t cells = static_cast<size_t>(xf.h) * xf.w;
  for (int i = 0; i < n; ++i) {
    dxf.v[i * cells + static_cast<size_t>(label_index)] += w3 * d_label(i) * 0.5;
    for (size_t j = 0; j < cells; ++j) dxf.v[i * cells + j] += dxm.v[i * cells + j];
  }

  nets.generator.backward(dxf);
  return total;
}

namespace {

struct EpochAccumulator {
  LossValues sum;
  int count = 0;
  void add(const LossValues& v) {
    sum.d_orig += v.d_orig;
    sum.g_orig += v.g_orig;
    sum.l_mean += v.l_mean;
    sum.l_sd += v.l_sd;
    sum.g_info += v.g_info;
    sum.c_class += v.c_class;
    sum.g_class += v.g_class;
    ++count;
  }
  LossValues mean() const {
    LossValues m = sum;
    double k = count > 0 ? static_cast<double>(count) : 1.0;
    m.d_orig /= k;
    m.g_orig /= k;
    m.l_mean /= k;
    m.l_sd /= k;
    m.g_info /= k;
    m.c_class /= k;
    m.g_class /= k;
    return m;
  }
};

}  // namespace

TrainedModel train(const RawTable& table, const TrainConfig& cfg,
                   const TrainObserver* observer) {
  cfg.validate();
  if (table.rows.empty()) throw InputError("cannot train on an empty table");
  if (table.rows.size() < static_cast<size_t>(cfg.batch_size))
    throw InputError("table has " + std::to_string(table.rows.size()) +
                     " rows, fewer than batch size " + std::to_string(cfg.batch_size));
  if (table.schema.label_index() < 0) throw InputError("schema has no label column");

  MatrixLayout layout = make_layout(table.schema.attribute_count());
  MatrixBatch encoded = encode_table(table, layout);
  Tensor all = batch_to_tensor(encoded);

  TrainedModel model;
  model.nets = build_networks(layout, cfg.latent_dim, cfg.base_filters, cfg.seed);
  model.schema = table.schema;
  model.layout = layout;
  model.config = cfg;
  model.ewma = EwmaState::zeros(model.nets.discriminator.feature_dim);
  model.train_row_count = table.rows.size();

  Generator& gen = model.nets.generator;
  Discriminator& dis = model.nets.discriminator;
  Classifier& cls = model.nets.classifier;

  Adam opt_g(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2);
  Adam opt_d(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2);
  Adam opt_c(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2);

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const int n = cfg.batch_size;
  const int d = layout.side;
  const size_t cells = static_cast<size_t>(d) * d;
  const int label_index = table.schema.label_index();
  const int batches = static_cast<int>(table.rows.size()) / n;  // drop last partial

  std::vector<size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);

  auto emit = [&](TrainEvent ev, int epoch, int batch) {
    if (observer && observer->on_event) observer->on_event(ev, epoch, batch);
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochAccumulator acc;
    for (int b = 0; b < batches; ++b) {
      // assemble real mini-batch
      Tensor xr(n, 1, d, d);
      for (int i = 0; i < n; ++i) {
        size_t row = order[static_cast<size_t>(b) * n + i];
        std::copy_n(all.v.begin() + row * cells, cells, xr.v.begin() + i * cells);
      }
      Tensor z(n, cfg.latent_dim, 1, 1);
      for (auto& v : z.v) v = unit(rng);

      LossValues step;

      // line 8: discriminator update
      dis.zero_grad();
      auto [pr_t, fr_unused] = dis.forward(xr, NetMode::train);
      Eigen::VectorXd pr = probs_to_vector(pr_t);
      Tensor dpr(n, 1, 1, 1);
      for (int i = 0; i < n; ++i)
        dpr.v[static_cast<size_t>(i)] = -1.0 / (n * (pr(i) + kLogEpsilon));
      dis.backward_prob_only(dpr);
      Tensor xf = gen.forward(z, NetMode::train);
      auto [pf_t, ff_unused] = dis.forward(xf, NetMode::train);
      Eigen::VectorXd pf = probs_to_vector(pf_t);
      Tensor dpf(n, 1, 1, 1);
      for (int i = 0; i < n; ++i)
        dpf.v[static_cast<size_t>(i)] = 1.0 / (n * (1.0 - pf(i) + kLogEpsilon));
      dis.backward_prob_only(dpf);
      step.d_orig = orig_loss_d(pr, pf);
      opt_d.step(dis.params(), cfg.grad_clip);
      emit(TrainEvent::d_step, epoch, b);

      // line 9: classifier update on real records
      cls.zero_grad();
      Tensor xm = xr;
      mask_label_cell(xm, label_index);
      auto [cp_t, cf_unused] = cls.forward(xm, NetMode::train);
      Eigen::VectorXd cp = probs_to_vector(cp_t);
      Eigen::VectorXd labels_r = label_cells(xr, label_index);
      step.c_class = class_loss_value(labels_r, cp, cfg.class_loss_mode);
      Eigen::VectorXd d_pred, d_label_unused;
      class_loss_grads(labels_r, cp, cfg.class_loss_mode, d_pred, d_label_unused);
      Tensor dcp(n, 1, 1, 1);
      for (int i = 0; i < n; ++i) dcp.v[static_cast<size_t>(i)] = d_pred(i);
      cls.backward_prob_only(dcp);
      opt_c.step(cls.params(), cfg.grad_clip);
      emit(TrainEvent::c_step, epoch, b);

      // lines 10-13 + 14: EWMA statistics then generator update. Feature
      // statistics are taken after this batch's D and C updates.
      auto [pr2_t, fr2_t] = dis.forward(xr, NetMode::train);
      BatchFeatureStats real_stats = feature_stats(features_to_matrix(fr2_t));
      gen.net.zero_grad();
      dis.zero_grad();
      cls.zero_grad();
      BatchFeatureStats fake_stats;
      double g_total = generator_composite_loss(model.nets, z, real_stats, model.ewma,
                                                cfg, table.schema, layout, true, &step,
                                                &fake_stats);
      model.ewma.f_mean_x = ewma_update(model.ewma.f_mean_x, real_stats.mean, cfg.ewma_weight);
      model.ewma.f_sd_x = ewma_update(model.ewma.f_sd_x, real_stats.sd, cfg.ewma_weight);
      model.ewma.f_mean_z = ewma_update(model.ewma.f_mean_z, fake_stats.mean, cfg.ewma_weight);
      model.ewma.f_sd_z = ewma_update(model.ewma.f_sd_z, fake_stats.sd, cfg.ewma_weight);
      emit(TrainEvent::ewma_update, epoch, b);
      opt_g.step(gen.net.params(), cfg.grad_clip);
      emit(TrainEvent::g_step, epoch, b);

      if (!std::isfinite(step.d_orig) || !std::isfinite(step.c_class) ||
          !std::isfinite(g_total)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << " batch " << b
            << " (d=" << step.d_orig << ", c=" << step.c_class << ", g=" << g_total
            << ")";
        throw std::runtime_error(msg.str());
      }
      acc.add(step);
    }
    model.loss_history.push_back(acc.mean());
    if (observer && observer->on_epoch)
      observer->on_epoch(epoch, model.loss_history.back(), model);
  }
  return model;
}

RawTable synthesize(TrainedModel& model, size_t n, uint64_t seed) {
  LatentBatch z = sample_latent(static_cast<Eigen::Index>(n),
                                model.nets.generator.latent_dim, seed);
  MatrixBatch out = generate(model.nets.generator, z);
  return decode_batch(out, model.schema);
}

RawTable train_chunked(const RawTable& table, const TrainConfig& cfg, int chunk_count,
                       const TrainObserver* observer) {
  if (chunk_count < 1) throw InputError("chunk count must be >= 1");
  size_t n = table.rows.size();
  if (n / static_cast<size_t>(chunk_count) < static_cast<size_t>(cfg.batch_size))
    throw InputError("chunk too small: " + std::to_string(n) + " rows over " +
                     std::to_string(chunk_count) + " chunks with batch size " +
                     std::to_string(cfg.batch_size));
  RawTable merged{table.schema, {}};
  merged.rows.reserve(n);
  size_t base = n / static_cast<size_t>(chunk_count);
  size_t rem = n % static_cast<size_t>(chunk_count);
  size_t start = 0;
  for (int chunk = 0; chunk < chunk_count; ++chunk) {
    size_t size = base + (static_cast<size_t>(chunk) < rem ? 1 : 0);
    RawTable part{table.schema, {table.rows.begin() + static_cast<long>(start),
                                 table.rows.begin() + static_cast<long>(start + size)}};
    start += size;
    TrainConfig chunk_cfg = cfg;
    chunk_cfg.seed = cfg.seed + static_cast<uint64_t>(chunk);
    TrainedModel model = train(part, chunk_cfg, observer);
    RawTable synth = synthesize(model, part.rows.size(), chunk_cfg.seed);
    for (auto& row : synth.rows) merged.rows.push_back(std::move(row));
  }
  return merged;
}

}  // namespace tablegan
