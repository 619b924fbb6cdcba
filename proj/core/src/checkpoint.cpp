#include "tablegan/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json_util.hpp"

namespace tablegan {

namespace {

constexpr char kMagic[4] = {'T', 'G', 'C', 'K'};
constexpr uint32_t kVersion = 1;

std::vector<std::vector<double>*> model_state(TrainedModel& model) {
  std::vector<std::vector<double>*> blocks = model.nets.generator.net.persistent_state();
  for (auto* b : model.nets.discriminator.body.persistent_state()) blocks.push_back(b);
  for (auto* b : model.nets.discriminator.net_head.persistent_state()) blocks.push_back(b);
  for (auto* b : model.nets.classifier.body.persistent_state()) blocks.push_back(b);
  for (auto* b : model.nets.classifier.net_head.persistent_state()) blocks.push_back(b);
  return blocks;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::string& path) {
  nlohmann::json header;
  header["version"] = kVersion;
  header["schema"] = schema_to_json(model.schema);
  header["schema_hash"] = model.schema.hash();
  header["layout"] = {{"side", model.layout.side},
                      {"attribute_count", model.layout.attribute_count},
                      {"pad_count", model.layout.pad_count}};
  header["config"] = train_config_to_json(model.config);
  header["ewma"] = {{"f_mean_x", vector_to_json(model.ewma.f_mean_x)},
                    {"f_sd_x", vector_to_json(model.ewma.f_sd_x)},
                    {"f_mean_z", vector_to_json(model.ewma.f_mean_z)},
                    {"f_sd_z", vector_to_json(model.ewma.f_sd_z)}};
  nlohmann::json history = nlohmann::json::array();
  for (const auto& row : model.loss_history)
    history.push_back({{"d_orig", row.d_orig},
                       {"g_orig", row.g_orig},
                       {"l_mean", row.l_mean},
                       {"l_sd", row.l_sd},
                       {"g_info", row.g_info},
                       {"c_class", row.c_class},
                       {"g_class", row.g_class}});
  header["loss_history"] = std::move(history);
  header["train_row_count"] = model.train_row_count;
  header["signatures"] = {{"generator", model.nets.generator.signature()},
                          {"discriminator", model.nets.discriminator.signature()},
                          {"classifier", model.nets.classifier.signature()}};
  std::string header_text = header.dump();

  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    auto header_len = static_cast<uint64_t>(header_text.size());
    write_pod(out, header_len);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

    auto blocks = model_state(const_cast<TrainedModel&>(model));
    auto block_count = static_cast<uint64_t>(blocks.size());
    write_pod(out, block_count);
    for (const auto* block : blocks) {
      auto len = static_cast<uint64_t>(block->size());
      write_pod(out, len);
      out.write(reinterpret_cast<const char*>(block->data()),
                static_cast<std::streamsize>(block->size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("I/O failure writing checkpoint '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

TrainedModel load_checkpoint(const std::string& path, const TableSchema* expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path + "'");
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InputError("'" + path + "' is not a table-GAN checkpoint");
  uint32_t version = 0;
  read_pod(in, version);
  if (version != kVersion)
    throw InputError("checkpoint version " + std::to_string(version) +
                     " unsupported (expected " + std::to_string(kVersion) + ")");
  uint64_t header_len = 0;
  read_pod(in, header_len);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw InputError("corrupt checkpoint '" + path + "': truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("corrupt checkpoint '" + path + "': " + e.what());
  }

  TrainedModel model;
  model.schema = schema_from_json(header.at("schema"));
  uint64_t stored_hash = header.at("schema_hash").get<uint64_t>();
  if (model.schema.hash() != stored_hash)
    throw InputError("corrupt checkpoint '" + path + "': schema hash mismatch");
  if (expected_schema && expected_schema->hash() != stored_hash)
    throw InputError("checkpoint '" + path +
                     "' was trained against a different schema (hash mismatch)");

  model.layout.side = header.at("layout").at("side").get<int>();
  model.layout.attribute_count = header.at("layout").at("attribute_count").get<int>();
  model.layout.pad_count = header.at("layout").at("pad_count").get<int>();
  model.config = train_config_from_json(header.at("config"));
  model.train_row_count = header.at("train_row_count").get<uint64_t>();

  model.nets = build_networks(model.layout, model.config.latent_dim,
                              model.config.base_filters, model.config.seed);
  model.ewma.f_mean_x = vector_from_json(header.at("ewma").at("f_mean_x"));
  model.ewma.f_sd_x = vector_from_json(header.at("ewma").at("f_sd_x"));
  model.ewma.f_mean_z = vector_from_json(header.at("ewma").at("f_mean_z"));
  model.ewma.f_sd_z = vector_from_json(header.at("ewma").at("f_sd_z"));
  for (const auto& row : header.at("loss_history")) {
    LossValues v;
    v.d_orig = row.at("d_orig").get<double>();
    v.g_orig = row.at("g_orig").get<double>();
    v.l_mean = row.at("l_mean").get<double>();
    v.l_sd = row.at("l_sd").get<double>();
    v.g_info = row.at("g_info").get<double>();
    v.c_class = row.at("c_class").get<double>();
    v.g_class = row.at("g_class").get<double>();
    model.loss_history.push_back(v);
  }

  auto blocks = model_state(model);
  uint64_t block_count = 0;
  read_pod(in, block_count);
  if (block_count != blocks.size())
    throw InputError("corrupt checkpoint '" + path + "': parameter block count " +
                     std::to_string(block_count) + ", expected " +
                     std::to_string(blocks.size()));
  for (auto* block : blocks) {
    uint64_t len = 0;
    read_pod(in, len);
    if (len != block->size())
      throw InputError("corrupt checkpoint '" + path + "': parameter block size mismatch");
    in.read(reinterpret_cast<char*>(block->data()),
            static_cast<std::streamsize>(len * sizeof(double)));
  }
  if (!in) throw InputError("corrupt checkpoint '" + path + "': truncated parameters");
  return model;
}

}  // namespace tablegan
