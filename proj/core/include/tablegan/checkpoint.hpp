#pragma once

#include <string>

#include "tablegan/trainer.hpp"

namespace tablegan {

/// Versioned checkpoint: a JSON header (schema, layout, training config,
/// EWMA state, loss history, schema hash) followed by the raw parameter and
/// batch-normalization state of all three networks. Written atomically.
void save_checkpoint(const TrainedModel& model, const std::string& path);

/// Loads a checkpoint. When `expected_schema` is given, loading fails if the
/// stored schema hash does not match it.
TrainedModel load_checkpoint(const std::string& path,
                             const TableSchema* expected_schema = nullptr);

}  // namespace tablegan
