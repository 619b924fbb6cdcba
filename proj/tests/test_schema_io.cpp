#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "tablegan/table_io.hpp"

using namespace tablegan;

namespace {

ColumnDecl make_decl(const std::string& name, ColumnKind kind, double min, double max,
                     bool qid = false) {
  ColumnDecl d;
  d.name = name;
  d.kind = kind;
  d.min = min;
  d.max = max;
  d.is_qid = qid;
  return d;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("build_schema: payroll-style declaration set") {
  // 2 QIDs + 21 sensitive columns + 1 label -> m = 23
  std::vector<std::string> header;
  std::vector<ColumnDecl> decls;
  header.push_back("zip");
  decls.push_back(make_decl("zip", ColumnKind::discrete, 10000, 99999, true));
  header.push_back("age");
  decls.push_back(make_decl("age", ColumnKind::discrete, 18, 90, true));
  for (int i = 0; i < 20; ++i) {
    std::string name = "pay" + std::to_string(i);
    header.push_back(name);
    decls.push_back(make_decl(name, ColumnKind::continuous, 0, 250000));
  }
  header.push_back("high_salary");
  decls.push_back(make_decl("high_salary", ColumnKind::label, 0, 1));

  TableSchema schema = build_schema(header, decls);
  CHECK(schema.attribute_count() == 23);
  int qids = 0;
  for (const auto& col : schema.columns) qids += col.is_qid ? 1 : 0;
  CHECK(qids == 2);
  CHECK(schema.label_index() == 22);
  CHECK(schema.columns[22].label_is_binary);
}

TEST_CASE("build_schema: degenerate range rejected") {
  std::vector<std::string> header{"x", "label"};
  std::vector<ColumnDecl> decls{make_decl("x", ColumnKind::continuous, 5, 5),
                                make_decl("label", ColumnKind::label, 0, 1)};
  CHECK_THROWS_WITH_AS(build_schema(header, decls),
                       doctest::Contains("degenerate column range"), InputError);
}

TEST_CASE("build_schema: duplicate header rejected") {
  std::vector<std::string> header{"age", "age", "label"};
  std::vector<ColumnDecl> decls{make_decl("age", ColumnKind::continuous, 0, 1),
                                make_decl("age2", ColumnKind::continuous, 0, 1),
                                make_decl("label", ColumnKind::label, 0, 1)};
  CHECK_THROWS_WITH_AS(build_schema(header, decls), doctest::Contains("duplicate column"),
                       InputError);
}

TEST_CASE("build_schema: label count enforced") {
  std::vector<std::string> header{"x", "y"};
  SUBCASE("no label") {
    std::vector<ColumnDecl> decls{make_decl("x", ColumnKind::continuous, 0, 1),
                                  make_decl("y", ColumnKind::continuous, 0, 1)};
    CHECK_THROWS_AS(build_schema(header, decls), InputError);
  }
  SUBCASE("two labels") {
    std::vector<ColumnDecl> decls{make_decl("x", ColumnKind::label, 0, 1),
                                  make_decl("y", ColumnKind::label, 0, 1)};
    CHECK_THROWS_AS(build_schema(header, decls), InputError);
  }
}

TEST_CASE("build_schema: ranges and categories inferred from data") {
  std::vector<std::string> header{"v", "color", "label"};
  ColumnDecl v;
  v.name = "v";
  v.kind = ColumnKind::continuous;
  ColumnDecl color;
  color.name = "color";
  color.kind = ColumnKind::categorical;
  ColumnDecl label;
  label.name = "label";
  label.kind = ColumnKind::label;
  std::vector<std::vector<std::string>> rows{{"3.5", "red", "1"},
                                             {"-1.25", "blue", "0"},
                                             {"2", "red", "0"}};
  TableSchema schema = build_schema(header, {v, color, label}, rows);
  CHECK(schema.columns[0].min == doctest::Approx(-1.25));
  CHECK(schema.columns[0].max == doctest::Approx(3.5));
  // categories are stored sorted
  CHECK(schema.columns[1].categories == std::vector<std::string>{"blue", "red"});
  CHECK(schema.columns[2].label_is_binary);
}

TEST_CASE("parse_declarations grammar") {
  auto decls = parse_declarations(
      "# comment\n"
      "column age discrete qid min=18 max=90\n"
      "\n"
      "column color categorical categories=red,green,blue\n"
      "column label label min=0 max=1\n");
  REQUIRE(decls.size() == 3);
  CHECK(decls[0].is_qid);
  CHECK(decls[0].min == doctest::Approx(18));
  CHECK(decls[1].categories.has_value());
  CHECK(decls[1].categories->size() == 3);
  CHECK(decls[2].kind == ColumnKind::label);

  CHECK_THROWS_AS(parse_declarations("row x y\n"), InputError);
  CHECK_THROWS_AS(parse_declarations("column x continuous frobnicate=1\n"), InputError);
}

TEST_CASE("CSV round trip preserves tables") {
  std::vector<std::string> header{"v", "color", "label"};
  ColumnDecl v = make_decl("v", ColumnKind::continuous, -10, 10);
  ColumnDecl color;
  color.name = "color";
  color.kind = ColumnKind::categorical;
  color.categories = {{"a,b", "plain", "wi\"th quote"}};
  ColumnDecl label = make_decl("label", ColumnKind::label, 0, 1);
  TableSchema schema = build_schema(header, {v, color, label});

  RawTable table{schema, {{0.125, 0, 1}, {-9.875, 2, 0}, {3.0000000001, 1, 1}}};
  std::string path = temp_path("tablegan_roundtrip.csv");
  write_table(table, path);
  RawTable again = read_table(path, schema);
  REQUIRE(again.rows.size() == table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r)
    for (size_t c = 0; c < table.rows[r].size(); ++c)
      CHECK(again.rows[r][c] == table.rows[r][c]);
  std::remove(path.c_str());
}

TEST_CASE("CSV errors carry row context") {
  std::string path = temp_path("tablegan_bad.csv");
  {
    std::ofstream out(path);
    out << "a,b,c,d,e\n1,2,3,4,5\n1,2,3,4\n";
  }
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("row 2"), InputError);

  {
    std::ofstream out(path);
    out << "v,label\nhello,1\n";
  }
  std::vector<ColumnDecl> decls{make_decl("v", ColumnKind::continuous, 0, 1),
                                make_decl("label", ColumnKind::label, 0, 1)};
  CHECK_THROWS_WITH_AS(read_table(path, decls), doctest::Contains("'v'"), InputError);
  std::remove(path.c_str());
}

TEST_CASE("CSV quoting") {
  CsvDocument doc = parse_csv("name,note\n\"a,b\",\"say \"\"hi\"\"\"\n");
  REQUIRE(doc.rows.size() == 1);
  CHECK(doc.rows[0][0] == "a,b");
  CHECK(doc.rows[0][1] == "say \"hi\"");
  CHECK_THROWS_AS(parse_csv("a,b\n\"unterminated\n"), InputError);
}

TEST_CASE("split_train_test: sizes, determinism, disjointness") {
  std::vector<std::string> header{"id", "label"};
  std::vector<ColumnDecl> decls{make_decl("id", ColumnKind::continuous, 0, 20000),
                                make_decl("label", ColumnKind::label, 0, 1)};
  TableSchema schema = build_schema(header, decls);

  RawTable table{schema, {}};
  for (int i = 0; i < 15000; ++i)
    table.rows.push_back({static_cast<double>(i), static_cast<double>(i % 2)});

  auto [train1, test1] = split_train_test(table, 0.2, 42);
  CHECK(train1.rows.size() == 12000);
  CHECK(test1.rows.size() == 3000);

  auto [train2, test2] = split_train_test(table, 0.2, 42);
  CHECK(train2.rows == train1.rows);
  CHECK(test2.rows == test1.rows);

  std::set<double> seen;
  for (const auto& r : train1.rows) seen.insert(r[0]);
  for (const auto& r : test1.rows) {
    CHECK(seen.count(r[0]) == 0);
    seen.insert(r[0]);
  }
  CHECK(seen.size() == 15000);

  RawTable tiny{schema, {{0, 0}, {1, 1}}};
  auto [tr, te] = split_train_test(tiny, 0.5, 1);
  CHECK(tr.rows.size() == 1);
  CHECK(te.rows.size() == 1);

  CHECK_THROWS_AS(split_train_test(RawTable{schema, {}}, 0.2, 1), InputError);
  CHECK_THROWS_AS(split_train_test(tiny, 0.0, 1), InputError);
}
