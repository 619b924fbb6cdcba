#include <doctest.h>

#include <random>
#include <set>

#include "tablegan/codec.hpp"
#include "tablegan/toy.hpp"

using namespace tablegan;

TEST_CASE("make_layout picks the smallest power-of-two side") {
  MatrixLayout l16 = make_layout(16);
  CHECK(l16.side == 4);
  CHECK(l16.pad_count == 0);

  MatrixLayout l23 = make_layout(23);
  CHECK(l23.side == 8);
  CHECK(l23.pad_count == 41);

  MatrixLayout l196 = make_layout(196);
  CHECK(l196.side == 16);
  CHECK(l196.pad_count == 60);

  MatrixLayout l2 = make_layout(2);
  CHECK(l2.side == 4);

  CHECK_THROWS_AS(make_layout(1), InputError);
}

TEST_CASE("layout maps attributes bijectively onto the first cells") {
  MatrixLayout layout = make_layout(23);
  std::set<std::pair<int, int>> cells;
  for (int a = 0; a < layout.attribute_count; ++a) {
    auto cell = layout.cell_of(a);
    CHECK(cell.first == a / layout.side);
    CHECK(cell.second == a % layout.side);
    CHECK(cells.insert(cell).second);  // distinct
  }
  CHECK(static_cast<int>(cells.size()) == layout.attribute_count);
}

namespace {

TableSchema small_schema() {
  std::vector<std::string> header{"c", "cat", "label"};
  ColumnDecl c;
  c.name = "c";
  c.kind = ColumnKind::continuous;
  c.min = 0;
  c.max = 100;
  ColumnDecl cat;
  cat.name = "cat";
  cat.kind = ColumnKind::categorical;
  cat.categories = {{"A", "B", "C"}};
  ColumnDecl label;
  label.name = "label";
  label.kind = ColumnKind::label;
  label.min = 0;
  label.max = 1;
  return build_schema(header, {c, cat, label});
}

}  // namespace

TEST_CASE("encode_record normalizes onto [-1,1]") {
  TableSchema schema = small_schema();
  MatrixLayout layout = make_layout(schema.attribute_count());

  auto mid = encode_record({50, 1, 1}, schema, layout);
  CHECK(mid[0] == doctest::Approx(0.0));   // midpoint of [0,100]
  CHECK(mid[1] == doctest::Approx(0.0));   // B -> index 1 of 3 -> 2*1/2-1
  CHECK(mid[2] == doctest::Approx(1.0));   // binary label 1

  auto lo = encode_record({0, 0, 0}, schema, layout);
  CHECK(lo[0] == doctest::Approx(-1.0));
  CHECK(lo[1] == doctest::Approx(-1.0));
  CHECK(lo[2] == doctest::Approx(-1.0));

  // padding stays exactly zero
  for (int i = schema.attribute_count(); i < layout.cells(); ++i) CHECK(lo[i] == 0.0);

  CHECK_THROWS_AS(encode_record({101, 0, 0}, schema, layout), InputError);
  CHECK_THROWS_AS(encode_record({50, 5, 0}, schema, layout), InputError);
}

TEST_CASE("decode_matrix clips and is total") {
  TableSchema schema = small_schema();
  MatrixLayout layout = make_layout(schema.attribute_count());

  std::vector<double> m(static_cast<size_t>(layout.cells()), 0.0);
  m[0] = 1.3;   // clips to range endpoint
  m[1] = 0.4;   // round((0.4+1)*2/2) = round(1.4) = 1 -> B
  m[2] = -3.0;  // clips to label 0
  auto record = decode_matrix(m, schema, layout);
  CHECK(record[0] == doctest::Approx(100.0));
  CHECK(record[1] == doctest::Approx(1.0));
  CHECK(record[2] == doctest::Approx(0.0));

  // decode never fails on arbitrary real matrices
  std::mt19937_64 rng(99);
  std::normal_distribution<double> wild(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    for (auto& v : m) v = wild(rng);
    auto rec = decode_matrix(m, schema, layout);
    validate_record(rec, schema);
  }
}

TEST_CASE("decode(encode(r)) round trip on the toy schema") {
  RawTable table = make_toy_table(500, 321);
  MatrixLayout layout = make_layout(table.schema.attribute_count());
  for (const auto& row : table.rows) {
    auto matrix = encode_record(row, table.schema, layout);
    for (int a = 0; a < layout.attribute_count; ++a) {
      CHECK(matrix[a] >= -1.0);
      CHECK(matrix[a] <= 1.0);
    }
    auto back = decode_matrix(matrix, table.schema, layout);
    for (size_t c = 0; c < row.size(); ++c) {
      const ColumnSpec& col = table.schema.columns[c];
      if (col.kind == ColumnKind::continuous)
        CHECK(std::abs(back[c] - row[c]) <= 1e-9);
      else
        CHECK(back[c] == row[c]);  // discrete/categorical exact
    }
  }
}

TEST_CASE("encode_table / decode_batch round trip") {
  RawTable table = make_toy_table(50, 7);
  MatrixLayout layout = make_layout(table.schema.attribute_count());
  MatrixBatch batch = encode_table(table, layout);
  CHECK(batch.count == 50);
  RawTable back = decode_batch(batch, table.schema);
  REQUIRE(back.rows.size() == table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r)
    for (size_t c = 0; c < table.rows[r].size(); ++c)
      CHECK(back.rows[r][c] == doctest::Approx(table.rows[r][c]).epsilon(1e-12));
}
