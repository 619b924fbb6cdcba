#pragma once

// Internal JSON (de)serialization shared by checkpoints and run manifests.

#include <json.hpp>

#include "tablegan/schema.hpp"
#include "tablegan/trainer.hpp"

namespace tablegan {

nlohmann::json schema_to_json(const TableSchema& schema);
TableSchema schema_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace tablegan
