#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tablegan/trainer.hpp"

namespace tablegan {

inline constexpr const char* kToolVersion = "0.1.0";

/// Options shared by every subcommand. The output directory is created if
/// absent; a manifest.json sufficient to re-execute the run is written
/// atomically at the end.
struct TrainOptions {
  std::string data_path;
  std::string schema_path;
  std::string out_dir;
  TrainConfig config;
  int chunk_count = 1;  // > 1 selects chunked training
};

struct TrainResult {
  std::string checkpoint_path;   // empty for chunked runs
  std::string synthetic_path;    // chunked runs emit the merged table instead
  std::string loss_history_path;
  std::string manifest_path;
};

TrainResult cmd_train(const TrainOptions& options);
TrainResult cmd_chunk_train(const TrainOptions& options);

struct GenerateOptions {
  std::string checkpoint_path;
  std::string out_dir;
  size_t rows = 0;  // 0: same number of records as the training table
  uint64_t seed = 0;
};

struct GenerateResult {
  std::string synthetic_path;
  std::string manifest_path;
  size_t rows = 0;
};

GenerateResult cmd_generate(const GenerateOptions& options);

struct EvaluateOptions {
  std::string original_path;
  std::string schema_path;
  std::string synthetic_path;
  std::string test_path;
  std::string out_dir;
  size_t exhibit_rows = 5;
};

struct EvaluateResult {
  std::string dcr_path;
  std::vector<std::string> cdf_paths;
  std::string compat_path;
  std::string exhibit_path;
  std::string manifest_path;
  std::string summary;  // one-screen text summary
};

EvaluateResult cmd_evaluate(const EvaluateOptions& options);

struct AttackOptions {
  std::string checkpoint_path;
  std::string original_path;
  std::string schema_path;
  std::string holdout_path;
  std::string out_dir;
  int shadow_count = 5;
  size_t rows_per_shadow = 0;  // 0: target training size
  uint64_t seed = 0;
};

struct AttackResult {
  std::string report_path;
  std::string samples_path;
  std::string manifest_path;
  double f1_target = 0.0, aucroc_target = 0.0;
  double f1_shadow = 0.0, aucroc_shadow = 0.0;
};

AttackResult cmd_attack(const AttackOptions& options);

struct SplitOptions {
  std::string data_path;
  std::string schema_path;
  std::string out_dir;
  double test_fraction = 0.2;
  uint64_t seed = 0;
};

struct SplitResult {
  std::string train_path;
  std::string test_path;
  std::string manifest_path;
};

SplitResult cmd_split(const SplitOptions& options);

/// Writes the per-epoch loss history CSV (epoch,d_orig,g_orig,l_mean,l_sd,
/// g_info,c_class,g_class).
void write_loss_history(const std::vector<LossValues>& history, const std::string& path);

}  // namespace tablegan
