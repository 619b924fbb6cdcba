#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tablegan/schema.hpp"

namespace tablegan {

/// Parses an RFC-4180-style CSV (header row, quoted fields, UTF-8 as bytes).
/// Returns header + raw text rows.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvDocument parse_csv(const std::string& text);
CsvDocument read_csv(const std::string& path);

/// Reads a table, building its schema from the declarations (ranges and
/// category sets inferred from this file's data where not declared).
RawTable read_table(const std::string& path, const std::vector<ColumnDecl>& declarations);

/// Reads a table against an existing schema (e.g. a held-out split must use
/// the training table's ranges). Every row is validated against `schema`.
RawTable read_table(const std::string& path, const TableSchema& schema);

void write_table(const RawTable& table, const std::string& path);

/// Serializes the table to CSV text (also the canonical form used for row
/// hashing and byte-identity checks).
std::string table_to_csv(const RawTable& table);

/// Canonical CSV serialization of one record (no trailing newline).
std::string row_to_csv(const RawTable& table, size_t row);

/// Seeded disjoint partition; test size = round(n * test_fraction).
std::pair<RawTable, RawTable> split_train_test(const RawTable& table,
                                               double test_fraction, uint64_t seed);

}  // namespace tablegan
