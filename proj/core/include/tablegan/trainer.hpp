#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tablegan/losses.hpp"
#include "tablegan/nets.hpp"
#include "tablegan/schema.hpp"
#include "tablegan/table_io.hpp"

namespace tablegan {

enum class ClassLossMode { absolute, cross_entropy };

struct TrainConfig {
  PrivacyConfig privacy;
  int epochs = 25;
  int batch_size = 64;
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double ewma_weight = 0.99;
  uint64_t seed = 0;
  GeneratorLossMode generator_loss_mode = GeneratorLossMode::nonsaturating;
  ClassLossMode class_loss_mode = ClassLossMode::absolute;
  double loss_weights[3] = {1.0, 1.0, 1.0};  // g_orig, g_info, g_class
  int latent_dim = 100;
  int base_filters = 64;
  double grad_clip = 0.0;  // 0 disables clipping
  int checkpoint_every = 0;  // epochs; 0 disables periodic checkpoints

  void validate() const;
};

/// Running approximations of the global feature statistics (Algorithm 2
/// lines 10-13), all initialized to zero vectors.
struct EwmaState {
  Eigen::VectorXd f_mean_x, f_sd_x, f_mean_z, f_sd_z;

  static EwmaState zeros(int feature_dim);
};

/// One EWMA step: w * state + (1-w) * batch_stat.
Eigen::VectorXd ewma_update(const Eigen::VectorXd& state, const Eigen::VectorXd& batch_stat,
                            double w);

struct TrainedModel {
  Networks nets;
  TableSchema schema;
  MatrixLayout layout;
  TrainConfig config;
  EwmaState ewma;
  std::vector<LossValues> loss_history;  // one entry per epoch
  uint64_t train_row_count = 0;
};

enum class TrainEvent { d_step, c_step, ewma_update, g_step };

struct TrainObserver {
  /// Called after each within-batch update in Algorithm 2 order.
  std::function<void(TrainEvent, int epoch, int batch)> on_event;
  /// Called at the end of each epoch with the epoch's mean losses.
  std::function<void(int epoch, const LossValues&, const TrainedModel&)> on_epoch;
};

/// Runs Algorithm 2 for cfg.epochs over the table. Deterministic for a fixed
/// config and seed; aborts with a diagnostic if any loss becomes non-finite.
TrainedModel train(const RawTable& table, const TrainConfig& cfg,
                   const TrainObserver* observer = nullptr);

/// Samples n latent vectors, generates in inference mode and decodes to
/// records. Counts as external generator queries.
RawTable synthesize(TrainedModel& model, size_t n, uint64_t seed);

/// Splits the table into `chunk_count` row-disjoint chunks, trains an
/// independent model per chunk (seed + chunk index), synthesizes per-chunk
/// tables of the chunk's size and concatenates them.
RawTable train_chunked(const RawTable& table, const TrainConfig& cfg, int chunk_count,
                       const TrainObserver* observer = nullptr);

/// Forward (and optionally backward) pass of the generator's composite loss
/// for one latent batch. The EWMA state is taken *before* the batch update;
/// the X-side statistics come from `real_stats` and are constants, while the
/// current batch's fake-feature statistics carry gradient with weight (1-w).
/// When `accumulate_grads` is set, gradients land in the generator parameters
/// (discriminator/classifier gradients are scratch). Returns the weighted
/// composite loss; unweighted components are written to `parts`.
double generator_composite_loss(Networks& nets, const Tensor& z,
                                const BatchFeatureStats& real_stats,
                                const EwmaState& state_before, const TrainConfig& cfg,
                                const TableSchema& schema, const MatrixLayout& layout,
                                bool accumulate_grads, LossValues* parts = nullptr,
                                BatchFeatureStats* fake_stats_out = nullptr);

}  // namespace tablegan
