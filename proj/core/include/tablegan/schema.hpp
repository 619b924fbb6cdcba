#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tablegan {

/// Invalid configuration, schema violations or malformed input. The CLI maps
/// this to exit code 2; everything else is a runtime failure (exit code 1).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

enum class ColumnKind { continuous, discrete, categorical, label };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& text);

/// One attribute of a table. Numeric kinds carry [min,max]; categorical kinds
/// carry the category list in sorted order (the canonical index encoding).
/// Label columns are binary {0,1} for classification tables and continuous
/// otherwise.
struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> categories;
  bool is_qid = false;
  bool label_is_binary = false;

  bool numeric() const {
    return kind == ColumnKind::continuous || kind == ColumnKind::discrete ||
           kind == ColumnKind::label;
  }
  size_t category_count() const { return categories.size(); }
};

struct TableSchema {
  std::vector<ColumnSpec> columns;

  int attribute_count() const { return static_cast<int>(columns.size()); }
  const ColumnSpec& column(int i) const { return columns.at(static_cast<size_t>(i)); }
  int index_of(const std::string& name) const;  // -1 if absent
  int label_index() const;

  /// Stable content hash (FNV-1a over the canonical serialization). Used by
  /// checkpoints to reject schema mismatches.
  uint64_t hash() const;
};

/// A loaded table. Cells are stored as doubles; categorical cells hold the
/// category index into their column's sorted category list. The CSV layer
/// translates between indices and category text.
struct RawTable {
  TableSchema schema;
  std::vector<std::vector<double>> rows;

  size_t row_count() const { return rows.size(); }
};

/// Per-column declaration as parsed from a schema config file. min/max and
/// categories are optional; anything missing is inferred from the data.
struct ColumnDecl {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  bool is_qid = false;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::vector<std::string>> categories;
};

/// Builds a validated schema for `header`, filling unspecified ranges and
/// category sets from `rows` (raw text cells, one vector per record).
/// Declarations must cover every header column and exactly one column must be
/// declared as the label.
TableSchema build_schema(const std::vector<std::string>& header,
                         const std::vector<ColumnDecl>& declarations,
                         const std::vector<std::vector<std::string>>& rows = {});

/// Parses the schema declaration file format:
///
///   # comment / blank lines ignored
///   column <name> <kind> [qid] [min=<v>] [max=<v>] [categories=a,b,c]
///
/// Declaration order must match the CSV header order.
std::vector<ColumnDecl> parse_declarations(const std::string& text);
std::vector<ColumnDecl> read_declarations(const std::string& path);

/// Validates one record against the schema. `row_number` is used in error
/// messages (1-based data row).
void validate_record(const std::vector<double>& record, const TableSchema& schema,
                     size_t row_number = 0);

}  // namespace tablegan
