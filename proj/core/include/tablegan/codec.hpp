#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tablegan/schema.hpp"

namespace tablegan {

/// Square matrix layout for converting records with m attributes into d x d
/// matrices. d is the smallest power of two with d >= 4 and d*d >= m;
/// attributes occupy the first m cells row-major, remaining cells are padding.
struct MatrixLayout {
  int side = 0;
  int attribute_count = 0;
  int pad_count = 0;

  std::pair<int, int> cell_of(int attribute) const {
    return {attribute / side, attribute % side};
  }
  int cells() const { return side * side; }
};

MatrixLayout make_layout(int attribute_count);

/// A batch of d x d matrices, the network-facing representation of records.
/// Non-padded cells of encoded real records lie in [-1,1]; padded cells are
/// exactly 0. Generator outputs share the container but may carry nonzero
/// padding.
struct MatrixBatch {
  MatrixLayout layout;
  size_t count = 0;
  std::vector<double> values;  // count * side * side, row-major per matrix

  MatrixBatch() = default;
  MatrixBatch(MatrixLayout l, size_t n)
      : layout(l), count(n),
        values(n * static_cast<size_t>(l.side) * static_cast<size_t>(l.side), 0.0) {}

  std::span<double> matrix(size_t i) {
    size_t cells = static_cast<size_t>(layout.side) * layout.side;
    return {values.data() + i * cells, cells};
  }
  std::span<const double> matrix(size_t i) const {
    size_t cells = static_cast<size_t>(layout.side) * layout.side;
    return {values.data() + i * cells, cells};
  }
};

/// Normalizes one raw value onto [-1,1] per its column spec.
double encode_value(const ColumnSpec& col, double value);

/// Inverse of encode_value with clipping; total on any real input.
double decode_value(const ColumnSpec& col, double cell);

/// Encodes a validated record into a d x d matrix (row-major, zero padding).
std::vector<double> encode_record(const std::vector<double>& record,
                                  const TableSchema& schema, const MatrixLayout& layout);

/// Decodes a d x d matrix back into a record; never fails.
std::vector<double> decode_matrix(std::span<const double> matrix,
                                  const TableSchema& schema, const MatrixLayout& layout);

MatrixBatch encode_table(const RawTable& table, const MatrixLayout& layout);
RawTable decode_batch(const MatrixBatch& batch, const TableSchema& schema);

}  // namespace tablegan
