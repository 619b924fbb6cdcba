#pragma once

#include <cstdint>

#include "tablegan/schema.hpp"

namespace tablegan {

/// Deterministic benchmark table: 10 continuous, 3 discrete and 2 categorical
/// attributes plus a binary label defined by the rule label = 1[a1 + a2 > 1]
/// on the two unit-range attributes. Ranges are declared (not inferred), so
/// any two samples share the same schema.
RawTable make_toy_table(size_t rows, uint64_t seed);

TableSchema toy_schema();

/// Fraction of records whose label contradicts the rule 1[a1 + a2 > 1],
/// ignoring records with |a1 + a2 - 1| <= margin.
double toy_rule_violation_rate(const RawTable& table, double margin);

}  // namespace tablegan
