#include "tablegan/toy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tablegan {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(uint64_t seed) : engine(seed) {}
  double uniform() {  // [0,1)
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  double normal(double mean, double sd) {
    double u1 = std::max(uniform(), 1e-300);
    double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  int binomial(int trials, double p) {
    int hits = 0;
    for (int i = 0; i < trials; ++i)
      if (uniform() < p) ++hits;
    return hits;
  }
  int pick(const double* cumulative, int count) {
    double u = uniform();
    for (int i = 0; i < count - 1; ++i)
      if (u < cumulative[i]) return i;
    return count - 1;
  }
};

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

ColumnDecl decl(const char* name, ColumnKind kind, double min, double max,
                bool qid = false) {
  ColumnDecl d;
  d.name = name;
  d.kind = kind;
  d.is_qid = qid;
  d.min = min;
  d.max = max;
  return d;
}

std::vector<ColumnDecl> toy_declarations() {
  std::vector<ColumnDecl> decls;
  decls.push_back(decl("a1", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a2", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a3", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a4", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a5", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a6", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a7", ColumnKind::continuous, -5, 5));
  decls.push_back(decl("a8", ColumnKind::continuous, 40, 160));
  decls.push_back(decl("d1", ColumnKind::discrete, 0, 9, /*qid=*/true));
  decls.push_back(decl("d2", ColumnKind::discrete, 1, 50));
  decls.push_back(decl("d3", ColumnKind::discrete, 2013, 2015, /*qid=*/true));
  ColumnDecl c1;
  c1.name = "c1";
  c1.kind = ColumnKind::categorical;
  c1.is_qid = true;
  c1.categories = {{"A", "B", "C"}};
  decls.push_back(c1);
  ColumnDecl c2;
  c2.name = "c2";
  c2.kind = ColumnKind::categorical;
  c2.categories = {{"blue", "green", "red", "yellow"}};
  decls.push_back(c2);
  decls.push_back(decl("a9", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("a10", ColumnKind::continuous, 0, 1));
  decls.push_back(decl("label", ColumnKind::label, 0, 1));
  return decls;
}

}  // namespace

TableSchema toy_schema() {
  std::vector<std::string> header;
  auto decls = toy_declarations();
  for (const auto& d : decls) header.push_back(d.name);
  return build_schema(header, decls);
}

RawTable make_toy_table(size_t rows, uint64_t seed) {
  TableSchema schema = toy_schema();
  Rng rng(seed);
  RawTable table{schema, {}};
  table.rows.reserve(rows);
  // category index lookup: schema stores sorted categories, so pick by
  // probability over the sorted order directly.
  const double c1_cum_low[3] = {0.5, 0.8, 1.0};   // A,B,C when label = 0
  const double c1_cum_high[3] = {0.2, 0.5, 1.0};  // richer in C when label = 1
  const double c2_cum[4] = {0.4, 0.7, 0.9, 1.0};  // blue,green,red,yellow
  const double d3_cum[3] = {0.5, 0.8, 1.0};       // 2013,2014,2015

  for (size_t i = 0; i < rows; ++i) {
    double a1 = rng.uniform();
    double a2 = rng.uniform();
    double label = a1 + a2 > 1.0 ? 1.0 : 0.0;
    double a3 = clip01(0.6 * a1 + 0.4 * a2 + rng.normal(0.0, 0.05));
    double a4 = clip01(rng.normal(0.5, 0.15));
    double a5 = clip01(-std::log(1.0 - rng.uniform()) / 3.0);
    double a6 = clip01(a4 * a4 + rng.normal(0.0, 0.05));
    double a7 = -5.0 + 10.0 * rng.uniform();
    double a8 = std::clamp(rng.normal(100.0, 20.0), 40.0, 160.0);
    double d1 = rng.binomial(9, (a1 + a2) / 2.0);
    double d2 = 1.0 + std::floor(49.999 * std::pow(rng.uniform(), 1.5));
    double d3 = 2013.0 + rng.pick(d3_cum, 3);
    double c1 = rng.pick(label > 0.5 ? c1_cum_high : c1_cum_low, 3);
    double c2 = rng.pick(c2_cum, 4);
    double a9 = clip01(0.5 * a1 * a2 + 0.5 * rng.uniform());
    double a10 = clip01(1.0 - a3 + rng.normal(0.0, 0.03));
    table.rows.push_back(
        {a1, a2, a3, a4, a5, a6, a7, a8, d1, d2, d3, c1, c2, a9, a10, label});
  }
  return table;
}

double toy_rule_violation_rate(const RawTable& table, double margin) {
  int a1 = table.schema.index_of("a1");
  int a2 = table.schema.index_of("a2");
  int label = table.schema.label_index();
  if (a1 < 0 || a2 < 0 || label < 0)
    throw InputError("toy_rule_violation_rate: table lacks a1/a2/label columns");
  size_t considered = 0, violations = 0;
  for (const auto& row : table.rows) {
    double s = row[a1] + row[a2];
    if (std::abs(s - 1.0) <= margin) continue;
    ++considered;
    double rule = s > 1.0 ? 1.0 : 0.0;
    if (row[label] != rule) ++violations;
  }
  return considered == 0 ? 0.0
                         : static_cast<double>(violations) / static_cast<double>(considered);
}

}  // namespace tablegan
