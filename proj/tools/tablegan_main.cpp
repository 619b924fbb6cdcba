// tablegan command-line tool: train / generate / evaluate / attack / split /
// chunk-train. Exit codes: 0 success, 1 runtime failure, 2 configuration or
// input error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "tablegan/commands.hpp"
#include "tablegan/schema.hpp"

using namespace tablegan;

namespace {

// TABLEGAN_OUTDIR overrides --out; it is the only environment override.
void apply_outdir_env(std::string& out_dir) {
  if (const char* env = std::getenv("TABLEGAN_OUTDIR"); env && *env) out_dir = env;
}

void add_train_config_flags(CLI::App* cmd, TrainConfig& cfg, std::string& privacy) {
  cmd->add_option("--privacy", privacy, "privacy preset: low, mid or high");
  cmd->add_option("--delta-mean", cfg.privacy.delta_mean, "hinge threshold for L_mean");
  cmd->add_option("--delta-sd", cfg.privacy.delta_sd, "hinge threshold for L_sd");
  cmd->add_option("--epochs", cfg.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--batch-size", cfg.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--beta1", cfg.adam_beta1, "Adam beta1")->capture_default_str();
  cmd->add_option("--beta2", cfg.adam_beta2, "Adam beta2")->capture_default_str();
  cmd->add_option("--ewma-weight", cfg.ewma_weight, "EWMA weight w")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "training seed")->capture_default_str();
  cmd->add_option("--latent-dim", cfg.latent_dim, "latent dimension k")
      ->capture_default_str();
  cmd->add_option("--base-filters", cfg.base_filters, "filters of the first conv layer")
      ->capture_default_str();
  cmd->add_option("--grad-clip", cfg.grad_clip,
                  "global gradient-norm clip per network (0 = off)")
      ->capture_default_str();
  cmd->add_option("--checkpoint-every", cfg.checkpoint_every,
                  "write an intermediate checkpoint every N epochs (0 = off)")
      ->capture_default_str();
  cmd->add_option_function<std::string>(
         "--generator-loss",
         [&cfg](const std::string& mode) {
           if (mode == "literal")
             cfg.generator_loss_mode = GeneratorLossMode::literal;
           else if (mode == "nonsaturating")
             cfg.generator_loss_mode = GeneratorLossMode::nonsaturating;
           else
             throw CLI::ValidationError("--generator-loss",
                                        "expected literal|nonsaturating");
         },
         "generator adversarial loss: literal or nonsaturating");
  cmd->add_option_function<std::string>(
         "--class-loss",
         [&cfg](const std::string& mode) {
           if (mode == "absolute")
             cfg.class_loss_mode = ClassLossMode::absolute;
           else if (mode == "cross-entropy")
             cfg.class_loss_mode = ClassLossMode::cross_entropy;
           else
             throw CLI::ValidationError("--class-loss", "expected absolute|cross-entropy");
         },
         "classification loss: absolute or cross-entropy");
  cmd->add_option_function<std::vector<double>>(
         "--loss-weights",
         [&cfg](const std::vector<double>& weights) {
           if (weights.size() != 3)
             throw CLI::ValidationError("--loss-weights", "expected 3 values");
           for (int i = 0; i < 3; ++i) cfg.loss_weights[i] = weights[i];
         },
         "weights of g_orig, g_info, g_class (3 values)")
      ->expected(3);
}

void resolve_privacy(TrainConfig& cfg, const std::string& privacy) {
  if (!privacy.empty()) cfg.privacy = PrivacyConfig::from_preset(privacy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"table-GAN: adversarial table synthesis with tunable privacy"};
  app.require_subcommand(1);

  TrainOptions train_opts;
  std::string train_privacy;
  auto* train_cmd = app.add_subcommand("train", "train a model on a CSV table");
  train_cmd->add_option("--data", train_opts.data_path, "training CSV")->required();
  train_cmd->add_option("--schema", train_opts.schema_path, "schema declaration file")
      ->required();
  train_cmd->add_option("--out", train_opts.out_dir, "output directory")->required();
  add_train_config_flags(train_cmd, train_opts.config, train_privacy);

  TrainOptions chunk_opts;
  std::string chunk_privacy;
  auto* chunk_cmd =
      app.add_subcommand("chunk-train", "split the table into chunks, train one model "
                                        "per chunk and merge the synthetic outputs");
  chunk_cmd->add_option("--data", chunk_opts.data_path, "training CSV")->required();
  chunk_cmd->add_option("--schema", chunk_opts.schema_path, "schema declaration file")
      ->required();
  chunk_cmd->add_option("--out", chunk_opts.out_dir, "output directory")->required();
  chunk_cmd->add_option("--chunks", chunk_opts.chunk_count, "chunk count")->required();
  add_train_config_flags(chunk_cmd, chunk_opts.config, chunk_privacy);

  GenerateOptions gen_opts;
  auto* gen_cmd = app.add_subcommand("generate", "synthesize records from a checkpoint");
  gen_cmd->add_option("--checkpoint", gen_opts.checkpoint_path, "model checkpoint")
      ->required();
  gen_cmd->add_option("--out", gen_opts.out_dir, "output directory")->required();
  gen_cmd->add_option("--rows", gen_opts.rows,
                      "rows to synthesize (default: training table size)");
  gen_cmd->add_option("--seed", gen_opts.seed, "generation seed")->capture_default_str();

  EvaluateOptions eval_opts;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "DCR, per-attribute CDF/KS and model-compatibility "
                                     "reports for a synthetic table");
  eval_cmd->add_option("--original", eval_opts.original_path, "original training CSV")
      ->required();
  eval_cmd->add_option("--schema", eval_opts.schema_path, "schema declaration file")
      ->required();
  eval_cmd->add_option("--synthetic", eval_opts.synthetic_path, "synthetic CSV")
      ->required();
  eval_cmd->add_option("--test", eval_opts.test_path, "held-out test CSV")->required();
  eval_cmd->add_option("--out", eval_opts.out_dir, "output directory")->required();
  eval_cmd->add_option("--exhibit-rows", eval_opts.exhibit_rows,
                       "rows in the nearest-record exhibit")
      ->capture_default_str();

  AttackOptions attack_opts;
  auto* attack_cmd =
      app.add_subcommand("attack", "shadow-model membership-inference attack against a "
                                   "trained model");
  attack_cmd->add_option("--checkpoint", attack_opts.checkpoint_path, "target checkpoint")
      ->required();
  attack_cmd->add_option("--original", attack_opts.original_path, "target training CSV")
      ->required();
  attack_cmd->add_option("--schema", attack_opts.schema_path, "schema declaration file")
      ->required();
  attack_cmd->add_option("--holdout", attack_opts.holdout_path,
                         "real records never used for training")
      ->required();
  attack_cmd->add_option("--out", attack_opts.out_dir, "output directory")->required();
  attack_cmd->add_option("--shadows", attack_opts.shadow_count, "shadow model count")
      ->capture_default_str();
  attack_cmd->add_option("--rows-per-shadow", attack_opts.rows_per_shadow,
                         "rows per shadow corpus (default: training table size)");
  attack_cmd->add_option("--seed", attack_opts.seed, "attack seed")->capture_default_str();

  SplitOptions split_opts;
  auto* split_cmd = app.add_subcommand("split", "seeded train/test split of a CSV table");
  split_cmd->add_option("--data", split_opts.data_path, "input CSV")->required();
  split_cmd->add_option("--schema", split_opts.schema_path, "schema declaration file")
      ->required();
  split_cmd->add_option("--out", split_opts.out_dir, "output directory")->required();
  split_cmd->add_option("--test-fraction", split_opts.test_fraction, "test fraction")
      ->capture_default_str();
  split_cmd->add_option("--seed", split_opts.seed, "shuffle seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      resolve_privacy(train_opts.config, train_privacy);
      apply_outdir_env(train_opts.out_dir);
      TrainResult result = cmd_train(train_opts);
      std::cout << "checkpoint: " << result.checkpoint_path << "\n"
                << "loss history: " << result.loss_history_path << "\n"
                << "manifest: " << result.manifest_path << "\n";
    } else if (chunk_cmd->parsed()) {
      resolve_privacy(chunk_opts.config, chunk_privacy);
      apply_outdir_env(chunk_opts.out_dir);
      TrainResult result = cmd_chunk_train(chunk_opts);
      std::cout << "synthetic table: " << result.synthetic_path << "\n"
                << "manifest: " << result.manifest_path << "\n";
    } else if (gen_cmd->parsed()) {
      apply_outdir_env(gen_opts.out_dir);
      GenerateResult result = cmd_generate(gen_opts);
      std::cout << "synthetic table: " << result.synthetic_path << " (" << result.rows
                << " rows)\n";
    } else if (eval_cmd->parsed()) {
      apply_outdir_env(eval_opts.out_dir);
      EvaluateResult result = cmd_evaluate(eval_opts);
      std::cout << result.summary;
    } else if (attack_cmd->parsed()) {
      apply_outdir_env(attack_opts.out_dir);
      AttackResult result = cmd_attack(attack_opts);
      std::cout << "attack report: " << result.report_path << "\n"
                << "  target_discriminator: F-1 " << result.f1_target << ", AUCROC "
                << result.aucroc_target << "\n"
                << "  shadow_ensemble:      F-1 " << result.f1_shadow << ", AUCROC "
                << result.aucroc_shadow << "\n";
    } else if (split_cmd->parsed()) {
      apply_outdir_env(split_opts.out_dir);
      SplitResult result = cmd_split(split_opts);
      std::cout << "train: " << result.train_path << "\ntest: " << result.test_path
                << "\n";
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
