#pragma once

// Independent brute-force reference implementations used to cross-check the
// library. Everything here is deliberately written with plain loops and no
// shared code with the implementation under test.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tablegan/schema.hpp"

namespace oracles {

inline double loss_d(const std::vector<double>& p_real, const std::vector<double>& p_fake) {
  double a = 0.0;
  for (double p : p_real) a += std::log(p + 1e-8);
  a /= static_cast<double>(p_real.size());
  double b = 0.0;
  for (double p : p_fake) b += std::log(1.0 - p + 1e-8);
  b /= static_cast<double>(p_fake.size());
  return -(a + b);
}

inline double loss_g_literal(const std::vector<double>& p_fake) {
  double s = 0.0;
  for (double p : p_fake) s += std::log(1.0 - p + 1e-8);
  return s / static_cast<double>(p_fake.size());
}

inline double loss_g_nonsaturating(const std::vector<double>& p_fake) {
  double s = 0.0;
  for (double p : p_fake) s += std::log(p + 1e-8);
  return -s / static_cast<double>(p_fake.size());
}

struct Stats {
  std::vector<double> mean, sd;
};

inline Stats stats(const std::vector<std::vector<double>>& rows) {
  size_t dim = rows.at(0).size();
  Stats out;
  out.mean.assign(dim, 0.0);
  out.sd.assign(dim, 0.0);
  for (const auto& row : rows)
    for (size_t j = 0; j < dim; ++j) out.mean[j] += row[j];
  for (size_t j = 0; j < dim; ++j) out.mean[j] /= static_cast<double>(rows.size());
  for (const auto& row : rows)
    for (size_t j = 0; j < dim; ++j) {
      double d = row[j] - out.mean[j];
      out.sd[j] += d * d;
    }
  for (size_t j = 0; j < dim; ++j)
    out.sd[j] = std::sqrt(out.sd[j] / static_cast<double>(rows.size()));
  return out;
}

inline double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double hinge(double l_mean, double l_sd, double dm, double ds) {
  double a = l_mean - dm;
  double b = l_sd - ds;
  return (a > 0.0 ? a : 0.0) + (b > 0.0 ? b : 0.0);
}

inline double class_loss(const std::vector<double>& labels, const std::vector<double>& preds) {
  double s = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) s += std::fabs(labels[i] - preds[i]);
  return s / static_cast<double>(labels.size());
}

// [0,1] normalization matching the documented DCR convention, rewritten from
// the column spec.
inline double normalize_cell(const tablegan::ColumnSpec& col, double v) {
  if (col.kind == tablegan::ColumnKind::categorical) {
    if (col.categories.size() <= 1) return 0.0;
    return v / static_cast<double>(col.categories.size() - 1);
  }
  return (v - col.min) / (col.max - col.min);
}

struct DcrResult {
  double mean, std;
};

inline DcrResult dcr(const tablegan::RawTable& original, const tablegan::RawTable& comparison,
                     bool sensitive_only) {
  std::vector<size_t> cols;
  for (size_t c = 0; c < original.schema.columns.size(); ++c) {
    if (sensitive_only && original.schema.columns[c].is_qid) continue;
    cols.push_back(c);
  }
  std::vector<double> dists;
  for (const auto& r : original.rows) {
    double best = 1e300;
    for (const auto& s : comparison.rows) {
      double d2 = 0.0;
      for (size_t c : cols) {
        double a = normalize_cell(original.schema.columns[c], r[c]);
        double b = normalize_cell(original.schema.columns[c], s[c]);
        d2 += (a - b) * (a - b);
      }
      if (d2 < best) best = d2;
    }
    dists.push_back(std::sqrt(best));
  }
  double mean = 0.0;
  for (double d : dists) mean += d;
  mean /= static_cast<double>(dists.size());
  double var = 0.0;
  for (double d : dists) var += (d - mean) * (d - mean);
  var /= static_cast<double>(dists.size());
  return {mean, std::sqrt(var)};
}

// Definitional two-sample KS: max CDF gap over the union of sample points.
inline double ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> grid = a;
  grid.insert(grid.end(), b.begin(), b.end());
  double worst = 0.0;
  for (double x : grid) {
    double fa = 0.0, fb = 0.0;
    for (double v : a)
      if (v <= x) fa += 1.0;
    for (double v : b)
      if (v <= x) fb += 1.0;
    fa /= static_cast<double>(a.size());
    fb /= static_cast<double>(b.size());
    worst = std::max(worst, std::fabs(fa - fb));
  }
  return worst;
}

// Exhaustive nearest neighbour for the exhibit check.
inline size_t nearest_index(const tablegan::RawTable& table, const tablegan::RawTable& pool,
                            size_t row) {
  size_t best_j = 0;
  double best = 1e300;
  for (size_t j = 0; j < pool.rows.size(); ++j) {
    double d2 = 0.0;
    for (size_t c = 0; c < table.schema.columns.size(); ++c) {
      double a = normalize_cell(table.schema.columns[c], table.rows[row][c]);
      double b = normalize_cell(table.schema.columns[c], pool.rows[j][c]);
      d2 += (a - b) * (a - b);
    }
    if (d2 < best) {
      best = d2;
      best_j = j;
    }
  }
  return best_j;
}

}  // namespace oracles
