#include "tablegan/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json_util.hpp"
#include "tablegan/attack.hpp"
#include "tablegan/checkpoint.hpp"
#include "tablegan/evaluation.hpp"
#include "tablegan/table_io.hpp"

namespace tablegan {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw InputError("output directory must be set");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw InputError(std::string(what) + " '" + path + "' does not exist");
}

void write_text_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("I/O failure writing '" + path + "'");
  }
  fs::rename(tmp, path);
}

struct ManifestTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const std::string& out_dir, const std::string& command,
                    nlohmann::json options, nlohmann::json artifacts,
                    const ManifestTimer& timer) {
  nlohmann::json manifest{{"command", command},
                          {"tool_version", kToolVersion},
                          {"options", std::move(options)},
                          {"artifacts", std::move(artifacts)},
                          {"duration_seconds", timer.seconds()}};
  write_text_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

RawTable load_with_declarations(const std::string& data_path, const std::string& schema_path) {
  require_file(data_path, "dataset");
  require_file(schema_path, "schema file");
  return read_table(data_path, read_declarations(schema_path));
}

nlohmann::json train_options_json(const TrainOptions& o) {
  nlohmann::json j{{"data", o.data_path},
                   {"schema", o.schema_path},
                   {"out_dir", o.out_dir},
                   {"chunk_count", o.chunk_count},
                   {"config", train_config_to_json(o.config)}};
  j["privacy_preset"] = o.config.privacy.preset_name();
  return j;
}

}  // namespace

void write_loss_history(const std::vector<LossValues>& history, const std::string& path) {
  std::string text = "epoch,d_orig,g_orig,l_mean,l_sd,g_info,c_class,g_class\n";
  for (size_t e = 0; e < history.size(); ++e) {
    const LossValues& v = history[e];
    text += std::to_string(e) + ',' + fmt(v.d_orig) + ',' + fmt(v.g_orig) + ',' +
            fmt(v.l_mean) + ',' + fmt(v.l_sd) + ',' + fmt(v.g_info) + ',' +
            fmt(v.c_class) + ',' + fmt(v.g_class) + '\n';
  }
  write_text_atomic(path, text);
}

TrainResult cmd_train(const TrainOptions& options) {
  ManifestTimer timer;
  ensure_out_dir(options.out_dir);
  RawTable table = load_with_declarations(options.data_path, options.schema_path);

  TrainResult result;
  result.checkpoint_path = (fs::path(options.out_dir) / "model.tgck").string();
  result.loss_history_path = (fs::path(options.out_dir) / "loss_history.csv").string();
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();

  TrainObserver observer;
  int every = options.config.checkpoint_every;
  if (every > 0) {
    observer.on_epoch = [&](int epoch, const LossValues&, const TrainedModel& model) {
      if ((epoch + 1) % every == 0 && epoch + 1 < model.config.epochs) {
        auto path = fs::path(options.out_dir) /
                    ("model_epoch_" + std::to_string(epoch + 1) + ".tgck");
        save_checkpoint(model, path.string());
      }
    };
  }
  TrainedModel model = train(table, options.config, every > 0 ? &observer : nullptr);
  save_checkpoint(model, result.checkpoint_path);
  write_loss_history(model.loss_history, result.loss_history_path);

  write_manifest(options.out_dir, "train", train_options_json(options),
                 nlohmann::json{{"checkpoint", result.checkpoint_path},
                                {"loss_history", result.loss_history_path}},
                 timer);
  return result;
}

TrainResult cmd_chunk_train(const TrainOptions& options) {
  ManifestTimer timer;
  ensure_out_dir(options.out_dir);
  RawTable table = load_with_declarations(options.data_path, options.schema_path);

  TrainResult result;
  result.synthetic_path = (fs::path(options.out_dir) / "synthetic.csv").string();
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();

  RawTable synthetic = train_chunked(table, options.config, options.chunk_count);
  write_table(synthetic, result.synthetic_path);

  write_manifest(options.out_dir, "chunk-train", train_options_json(options),
                 nlohmann::json{{"synthetic", result.synthetic_path}}, timer);
  return result;
}

GenerateResult cmd_generate(const GenerateOptions& options) {
  ManifestTimer timer;
  ensure_out_dir(options.out_dir);
  require_file(options.checkpoint_path, "checkpoint");
  TrainedModel model = load_checkpoint(options.checkpoint_path);

  GenerateResult result;
  result.rows = options.rows > 0 ? options.rows
                                 : static_cast<size_t>(model.train_row_count);
  result.synthetic_path = (fs::path(options.out_dir) / "synthetic.csv").string();
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();

  RawTable synthetic = synthesize(model, result.rows, options.seed);
  write_table(synthetic, result.synthetic_path);

  write_manifest(options.out_dir, "generate",
                 nlohmann::json{{"checkpoint", options.checkpoint_path},
                                {"out_dir", options.out_dir},
                                {"rows", result.rows},
                                {"seed", options.seed}},
                 nlohmann::json{{"synthetic", result.synthetic_path}}, timer);
  return result;
}

namespace {

std::string dcr_line(const DcrReport& r) {
  return to_string(r.subset) + ',' + fmt(r.mean) + ',' + fmt(r.std) + '\n';
}

void write_cdf_file(const CdfReport& report, const std::string& path) {
  // step CDFs sampled at every distinct value of either sample
  std::vector<double> grid;
  grid.reserve(report.original_sorted.size() + report.comparison_sorted.size());
  grid.insert(grid.end(), report.original_sorted.begin(), report.original_sorted.end());
  grid.insert(grid.end(), report.comparison_sorted.begin(), report.comparison_sorted.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::string text = "value,cdf_original,cdf_comparison\n";
  auto cdf_at = [](const std::vector<double>& sorted, double x) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  };
  for (double x : grid)
    text += fmt(x) + ',' + fmt(cdf_at(report.original_sorted, x)) + ',' +
            fmt(cdf_at(report.comparison_sorted, x)) + '\n';
  write_text_atomic(path, text);
}

}  // namespace

EvaluateResult cmd_evaluate(const EvaluateOptions& options) {
  ManifestTimer timer;
  ensure_out_dir(options.out_dir);
  RawTable original = load_with_declarations(options.original_path, options.schema_path);
  require_file(options.synthetic_path, "synthetic table");
  RawTable synthetic = read_table(options.synthetic_path, original.schema);
  require_file(options.test_path, "test table");
  RawTable test = read_table(options.test_path, original.schema);

  EvaluateResult result;
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();

  // DCR over both Table-5-style subsets
  DcrReport dcr_all = dcr(original, synthetic, DcrSubset::qid_plus_sensitive);
  DcrReport dcr_sens = dcr(original, synthetic, DcrSubset::sensitive_only);
  result.dcr_path = (fs::path(options.out_dir) / "dcr.csv").string();
  write_text_atomic(result.dcr_path,
                    "subset,mean,std\n" + dcr_line(dcr_all) + dcr_line(dcr_sens));

  // per-attribute CDF files with the KS summary
  std::string ks_text = "attribute,ks\n";
  double ks_sum = 0.0, ks_max = 0.0;
  std::string ks_max_attr;
  for (const auto& col : original.schema.columns) {
    CdfReport report = cdf_compare(original, synthetic, col.name);
    auto path = fs::path(options.out_dir) / ("cdf_" + col.name + ".csv");
    write_cdf_file(report, path.string());
    result.cdf_paths.push_back(path.string());
    ks_text += col.name + ',' + fmt(report.ks) + '\n';
    ks_sum += report.ks;
    if (report.ks >= ks_max) {
      ks_max = report.ks;
      ks_max_attr = col.name;
    }
  }
  std::string ks_path = (fs::path(options.out_dir) / "ks.csv").string();
  write_text_atomic(ks_path, ks_text);

  // model compatibility on the fixed roster
  const ColumnSpec& label = original.schema.columns[original.schema.label_index()];
  TaskKind task = label.label_is_binary ? TaskKind::classification : TaskKind::regression;
  auto points = model_compat(original, synthetic, test, task, default_roster());
  result.compat_path = (fs::path(options.out_dir) / "compat.csv").string();
  std::string compat_text = "algorithm,parameter,x,y,metric\n";
  double gap_sum = 0.0;
  for (const auto& p : points) {
    compat_text += p.algorithm + ',' + p.parameter + ',' + fmt(p.x) + ',' + fmt(p.y) +
                   ',' + (p.metric == CompatMetric::f1 ? "f1" : "mre") + '\n';
    gap_sum += std::abs(p.x - p.y);
  }
  write_text_atomic(result.compat_path, compat_text);

  // nearest-record exhibit for human inspection
  result.exhibit_path = (fs::path(options.out_dir) / "exhibit.csv").string();
  auto pairs = nearest_real_exhibit(original, synthetic, options.exhibit_rows);
  std::string exhibit_text = "distance";
  for (const auto& col : original.schema.columns) exhibit_text += ",orig_" + col.name;
  for (const auto& col : original.schema.columns) exhibit_text += ",synth_" + col.name;
  exhibit_text += '\n';
  for (const auto& pair : pairs) {
    exhibit_text += fmt(pair.distance);
    exhibit_text += ',' + row_to_csv(original, pair.original_row);
    exhibit_text += ',' + row_to_csv(synthetic, pair.synthetic_row);
    exhibit_text += '\n';
  }
  write_text_atomic(result.exhibit_path, exhibit_text);

  std::ostringstream summary;
  summary << "evaluation of " << options.synthetic_path << " vs " << options.original_path
          << "\n"
          << "  DCR qid+sensitive : " << dcr_all.mean << " +/- " << dcr_all.std << "\n"
          << "  DCR sensitive only: " << dcr_sens.mean << " +/- " << dcr_sens.std << "\n"
          << "  KS mean over " << original.schema.attribute_count()
          << " attributes: " << ks_sum / original.schema.attribute_count()
          << " (worst " << ks_max << " on " << ks_max_attr << ")\n"
          << "  model compatibility (" << (task == TaskKind::classification ? "F-1" : "MRE")
          << ", " << points.size()
          << " points): mean |x-y| = " << gap_sum / static_cast<double>(points.size())
          << "\n"
          << "  reports: " << options.out_dir << "\n";
  result.summary = summary.str();

  write_manifest(options.out_dir, "evaluate",
                 nlohmann::json{{"original", options.original_path},
                                {"schema", options.schema_path},
                                {"synthetic", options.synthetic_path},
                                {"test", options.test_path},
                                {"out_dir", options.out_dir},
                                {"exhibit_rows", options.exhibit_rows}},
                 nlohmann::json{{"dcr", result.dcr_path},
                                {"ks", ks_path},
                                {"compat", result.compat_path},
                                {"exhibit", result.exhibit_path}},
                 timer);
  return result;
}

AttackResult cmd_attack(const AttackOptions& options) {
  ManifestTimer timer;
  ensure_out_dir(options.out_dir);
  require_file(options.checkpoint_path, "checkpoint");
  RawTable original = load_with_declarations(options.original_path, options.schema_path);
  TrainedModel target = load_checkpoint(options.checkpoint_path, &original.schema);
  RawTable holdout = read_table(options.holdout_path, original.schema);
  if (holdout.rows.size() < 2)
    throw InputError("holdout table needs at least 2 rows");

  // holdout must be disjoint from the training rows (canonical row hashing)
  {
    std::unordered_map<std::string, size_t> train_rows;
    for (size_t r = 0; r < original.rows.size(); ++r)
      train_rows.emplace(row_to_csv(original, r), r + 1);
    for (size_t r = 0; r < holdout.rows.size(); ++r) {
      auto it = train_rows.find(row_to_csv(holdout, r));
      if (it != train_rows.end())
        throw InputError("holdout row " + std::to_string(r + 1) +
                         " duplicates training row " + std::to_string(it->second) + ": " +
                         row_to_csv(holdout, r));
    }
  }

  // Half of the holdout provides the shadows' 'out' records (step 4b); the
  // other half is reserved for attack evaluation.
  size_t half = holdout.rows.size() / 2;
  RawTable shadow_out{holdout.schema, {holdout.rows.begin(),
                                       holdout.rows.begin() + static_cast<long>(half)}};
  RawTable eval_out{holdout.schema, {holdout.rows.begin() + static_cast<long>(half),
                                     holdout.rows.end()}};

  size_t rows_per_shadow = options.rows_per_shadow > 0
                               ? options.rows_per_shadow
                               : static_cast<size_t>(target.train_row_count);

  auto corpora = build_shadow_corpora(target, options.shadow_count, rows_per_shadow,
                                      options.seed);
  auto shadows = train_shadows(corpora, target.config);

  std::vector<AttackSample> samples;
  for (size_t i = 0; i < shadows.size(); ++i) {
    auto shadow_samples = make_attack_samples(shadows[i], corpora[i], shadow_out);
    samples.insert(samples.end(), shadow_samples.begin(), shadow_samples.end());
  }
  AttackModel attack_model = train_attack_models(samples);

  // Balanced evaluation set: 'in' records subsampled from the training table
  // to match the reserved 'out' half.
  size_t eval_n = std::min(eval_out.rows.size(), original.rows.size());
  RawTable eval_out_trimmed{eval_out.schema,
                            {eval_out.rows.begin(),
                             eval_out.rows.begin() + static_cast<long>(eval_n)}};
  std::vector<size_t> order(original.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed ^ 0xa77ac4ed5eedULL);
  std::shuffle(order.begin(), order.end(), rng);
  RawTable eval_in{original.schema, {}};
  eval_in.rows.reserve(eval_n);
  for (size_t i = 0; i < eval_n; ++i) eval_in.rows.push_back(original.rows[order[i]]);

  AttackReport target_report = attack_eval(attack_model, target, eval_in,
                                           eval_out_trimmed,
                                           FeatureSource::target_discriminator);
  AttackReport shadow_report =
      attack_eval(attack_model, target, eval_in, eval_out_trimmed,
                  FeatureSource::shadow_ensemble, shadows);

  AttackResult result;
  result.f1_target = target_report.f1;
  result.aucroc_target = target_report.aucroc;
  result.f1_shadow = shadow_report.f1;
  result.aucroc_shadow = shadow_report.aucroc;
  result.report_path = (fs::path(options.out_dir) / "attack.csv").string();
  result.samples_path = (fs::path(options.out_dir) / "attack_samples.csv").string();
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();

  std::string dataset = fs::path(options.original_path).filename().string();
  std::string text = "dataset,privacy,feature_source,class,f1,aucroc\n";
  auto append_report = [&](const AttackReport& report) {
    std::string prefix = dataset + ',' + report.privacy.preset_name() + ',' +
                         to_string(report.source) + ',';
    for (const auto& cls : report.per_class)
      text += prefix + std::to_string(cls.class_value) + ',' + fmt(cls.f1) + ',' +
              fmt(cls.aucroc) + '\n';
    text += prefix + "all," + fmt(report.f1) + ',' + fmt(report.aucroc) + '\n';
  };
  append_report(target_report);
  append_report(shadow_report);
  write_text_atomic(result.report_path, text);

  std::string samples_text = "class,d_probability,membership\n";
  for (const auto& s : samples)
    samples_text += std::to_string(s.class_value) + ',' + fmt(s.d_probability) + ',' +
                    (s.membership == Membership::in ? "in" : "out") + '\n';
  write_text_atomic(result.samples_path, samples_text);

  write_manifest(options.out_dir, "attack",
                 nlohmann::json{{"checkpoint", options.checkpoint_path},
                                {"original", options.original_path},
                                {"schema", options.schema_path},
                                {"holdout", options.holdout_path},
                                {"out_dir", options.out_dir},
                                {"shadow_count", options.shadow_count},
                                {"rows_per_shadow", rows_per_shadow},
                                {"seed", options.seed}},
                 nlohmann::json{{"report", result.report_path},
                                {"samples", result.samples_path}},
                 timer);
  return result;
}

SplitResult cmd_split(const SplitOptions& options) {
  ManifestTimer timer;
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0))
    throw InputError("test fraction must be in (0,1)");
  ensure_out_dir(options.out_dir);
  RawTable table = load_with_declarations(options.data_path, options.schema_path);
  auto [train_part, test_part] = split_train_test(table, options.test_fraction, options.seed);

  SplitResult result;
  result.train_path = (fs::path(options.out_dir) / "train.csv").string();
  result.test_path = (fs::path(options.out_dir) / "test.csv").string();
  result.manifest_path = (fs::path(options.out_dir) / "manifest.json").string();
  write_table(train_part, result.train_path);
  write_table(test_part, result.test_path);

  write_manifest(options.out_dir, "split",
                 nlohmann::json{{"data", options.data_path},
                                {"schema", options.schema_path},
                                {"out_dir", options.out_dir},
                                {"test_fraction", options.test_fraction},
                                {"seed", options.seed}},
                 nlohmann::json{{"train", result.train_path},
                                {"test", result.test_path}},
                 timer);
  return result;
}

}  // namespace tablegan
