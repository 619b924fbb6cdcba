#include "json_util.hpp"

namespace tablegan {

using nlohmann::json;

json schema_to_json(const TableSchema& schema) {
  json cols = json::array();
  for (const auto& col : schema.columns) {
    json c{{"name", col.name},
           {"kind", to_string(col.kind)},
           {"is_qid", col.is_qid}};
    if (col.kind == ColumnKind::categorical) {
      c["categories"] = col.categories;
    } else {
      c["min"] = col.min;
      c["max"] = col.max;
    }
    if (col.kind == ColumnKind::label) c["binary"] = col.label_is_binary;
    cols.push_back(std::move(c));
  }
  return json{{"columns", cols}};
}

TableSchema schema_from_json(const json& j) {
  TableSchema schema;
  for (const auto& c : j.at("columns")) {
    ColumnSpec col;
    col.name = c.at("name").get<std::string>();
    col.kind = column_kind_from_string(c.at("kind").get<std::string>());
    col.is_qid = c.at("is_qid").get<bool>();
    if (col.kind == ColumnKind::categorical) {
      col.categories = c.at("categories").get<std::vector<std::string>>();
    } else {
      col.min = c.at("min").get<double>();
      col.max = c.at("max").get<double>();
    }
    if (col.kind == ColumnKind::label) col.label_is_binary = c.at("binary").get<bool>();
    schema.columns.push_back(std::move(col));
  }
  return schema;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"delta_mean", cfg.privacy.delta_mean},
              {"delta_sd", cfg.privacy.delta_sd},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"learning_rate", cfg.learning_rate},
              {"adam_beta1", cfg.adam_beta1},
              {"adam_beta2", cfg.adam_beta2},
              {"ewma_weight", cfg.ewma_weight},
              {"seed", cfg.seed},
              {"generator_loss_mode",
               cfg.generator_loss_mode == GeneratorLossMode::literal ? "literal"
                                                                     : "nonsaturating"},
              {"class_loss_mode",
               cfg.class_loss_mode == ClassLossMode::absolute ? "absolute"
                                                              : "cross_entropy"},
              {"loss_weights",
               {cfg.loss_weights[0], cfg.loss_weights[1], cfg.loss_weights[2]}},
              {"latent_dim", cfg.latent_dim},
              {"base_filters", cfg.base_filters},
              {"grad_clip", cfg.grad_clip},
              {"checkpoint_every", cfg.checkpoint_every}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.privacy.delta_mean = j.at("delta_mean").get<double>();
  cfg.privacy.delta_sd = j.at("delta_sd").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.adam_beta1 = j.at("adam_beta1").get<double>();
  cfg.adam_beta2 = j.at("adam_beta2").get<double>();
  cfg.ewma_weight = j.at("ewma_weight").get<double>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.generator_loss_mode = j.at("generator_loss_mode").get<std::string>() == "literal"
                                ? GeneratorLossMode::literal
                                : GeneratorLossMode::nonsaturating;
  cfg.class_loss_mode = j.at("class_loss_mode").get<std::string>() == "absolute"
                            ? ClassLossMode::absolute
                            : ClassLossMode::cross_entropy;
  auto weights = j.at("loss_weights");
  for (int i = 0; i < 3; ++i) cfg.loss_weights[i] = weights.at(i).get<double>();
  cfg.latent_dim = j.at("latent_dim").get<int>();
  cfg.base_filters = j.at("base_filters").get<int>();
  cfg.grad_clip = j.at("grad_clip").get<double>();
  cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
  return cfg;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

}  // namespace tablegan
