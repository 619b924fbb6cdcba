#include "tablegan/codec.hpp"

#include <algorithm>
#include <cmath>

namespace tablegan {

MatrixLayout make_layout(int attribute_count) {
  if (attribute_count < 2)
    throw InputError("layout needs at least 2 attributes, got " +
                     std::to_string(attribute_count));
  int side = 4;
  while (side * side < attribute_count) side *= 2;
  MatrixLayout layout;
  layout.side = side;
  layout.attribute_count = attribute_count;
  layout.pad_count = side * side - attribute_count;
  return layout;
}

double encode_value(const ColumnSpec& col, double value) {
  if (col.kind == ColumnKind::categorical) {
    size_t c = col.categories.size();
    if (c <= 1) return 0.0;
    return 2.0 * value / static_cast<double>(c - 1) - 1.0;
  }
  return 2.0 * (value - col.min) / (col.max - col.min) - 1.0;
}

double decode_value(const ColumnSpec& col, double cell) {
  double v = std::clamp(cell, -1.0, 1.0);
  if (col.kind == ColumnKind::categorical) {
    size_t c = col.categories.size();
    if (c <= 1) return 0.0;
    double idx = std::round((v + 1.0) * static_cast<double>(c - 1) / 2.0);
    return std::clamp(idx, 0.0, static_cast<double>(c - 1));
  }
  double raw = col.min + (v + 1.0) * (col.max - col.min) / 2.0;
  if (col.kind == ColumnKind::discrete ||
      (col.kind == ColumnKind::label && col.label_is_binary)) {
    double lo = std::ceil(col.min);
    double hi = std::floor(col.max);
    return std::clamp(std::round(raw), lo, hi);
  }
  return raw;
}

std::vector<double> encode_record(const std::vector<double>& record,
                                  const TableSchema& schema, const MatrixLayout& layout) {
  if (layout.attribute_count != schema.attribute_count())
    throw InputError("layout attribute count does not match schema");
  validate_record(record, schema);
  std::vector<double> matrix(static_cast<size_t>(layout.cells()), 0.0);
  for (int a = 0; a < layout.attribute_count; ++a)
    matrix[static_cast<size_t>(a)] = encode_value(schema.columns[a], record[a]);
  return matrix;
}

std::vector<double> decode_matrix(std::span<const double> matrix,
                                  const TableSchema& schema, const MatrixLayout& layout) {
  if (matrix.size() != static_cast<size_t>(layout.cells()))
    throw InputError("matrix size does not match layout side");
  std::vector<double> record(static_cast<size_t>(layout.attribute_count));
  for (int a = 0; a < layout.attribute_count; ++a)
    record[static_cast<size_t>(a)] = decode_value(schema.columns[a], matrix[a]);
  return record;
}

MatrixBatch encode_table(const RawTable& table, const MatrixLayout& layout) {
  MatrixBatch batch(layout, table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    auto m = encode_record(table.rows[i], table.schema, layout);
    std::copy(m.begin(), m.end(), batch.matrix(i).begin());
  }
  return batch;
}

RawTable decode_batch(const MatrixBatch& batch, const TableSchema& schema) {
  RawTable table{schema, {}};
  table.rows.reserve(batch.count);
  for (size_t i = 0; i < batch.count; ++i)
    table.rows.push_back(decode_matrix(batch.matrix(i), schema, batch.layout));
  return table;
}

}  // namespace tablegan
