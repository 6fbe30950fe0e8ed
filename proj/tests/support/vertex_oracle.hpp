#pragma once

// Brute-force LP oracle: enumerates every basic solution of a small dense
// LP with finite bounds and returns the best feasible objective.
// Exponential; only meant for instances with a handful of variables.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "eva/lp.hpp"

namespace eva::testing {

struct DenseRow {
  std::vector<double> a;
  double b;
};

struct VertexResult {
  double objective;
  std::vector<double> x;
};

namespace detail {

// Solves the square system in place; nullopt if (numerically) singular.
inline std::optional<std::vector<double>> gauss(std::vector<std::vector<double>> m, std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    }
    if (std::abs(m[piv][c]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = m[i][c] / m[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) r[i] /= m[i][i];
  return r;
}

}  // namespace detail

/// Minimum of c'x over {eq rows = b, le rows <= b, lo <= x <= hi}, bounds finite.
/// Returns nullopt when no basic feasible solution exists.
inline std::optional<VertexResult> enumerate_vertices(const lp::Problem& p, double tol = 1e-7) {
  const int n = p.num_variables();
  std::vector<DenseRow> eq, cand;
  for (int i = 0; i < p.num_rows(); ++i) {
    DenseRow row{std::vector<double>(static_cast<std::size_t>(n), 0.0), p.rhs()[static_cast<std::size_t>(i)]};
    const auto cols = p.row_cols(i);
    const auto vals = p.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) row.a[static_cast<std::size_t>(cols[k])] += vals[k];
    (p.row_kinds()[static_cast<std::size_t>(i)] == lp::RowKind::Equal ? eq : cand).push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    DenseRow lo{std::vector<double>(static_cast<std::size_t>(n), 0.0), p.lower()[static_cast<std::size_t>(j)]};
    lo.a[static_cast<std::size_t>(j)] = 1.0;
    DenseRow hi = lo;
    hi.b = p.upper()[static_cast<std::size_t>(j)];
    cand.push_back(lo);
    cand.push_back(hi);
  }
  const int need = n - static_cast<int>(eq.size());
  std::optional<VertexResult> best;
  if (need < 0 || need > static_cast<int>(cand.size())) return best;

  auto feasible = [&](const std::vector<double>& x) {
    for (int i = 0; i < p.num_rows(); ++i) {
      const auto cols = p.row_cols(i);
      const auto vals = p.row_values(i);
      double ax = 0.0;
      for (std::size_t k = 0; k < cols.size(); ++k) ax += vals[k] * x[static_cast<std::size_t>(cols[k])];
      const double r = ax - p.rhs()[static_cast<std::size_t>(i)];
      const double scale = 1.0 + std::abs(p.rhs()[static_cast<std::size_t>(i)]);
      if (p.row_kinds()[static_cast<std::size_t>(i)] == lp::RowKind::Equal ? std::abs(r) > tol * scale
                                                                           : r > tol * scale) {
        return false;
      }
    }
    for (int j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (x[uj] < p.lower()[uj] - tol || x[uj] > p.upper()[uj] + tol) return false;
    }
    return true;
  };

  std::vector<int> pick(static_cast<std::size_t>(need));
  for (int k = 0; k < need; ++k) pick[static_cast<std::size_t>(k)] = k;
  const int m = static_cast<int>(cand.size());
  while (true) {
    std::vector<std::vector<double>> mat;
    std::vector<double> rhs;
    for (const auto& r : eq) {
      mat.push_back(r.a);
      rhs.push_back(r.b);
    }
    for (int k : pick) {
      mat.push_back(cand[static_cast<std::size_t>(k)].a);
      rhs.push_back(cand[static_cast<std::size_t>(k)].b);
    }
    if (auto x = detail::gauss(mat, rhs); x && feasible(*x)) {
      const double obj = p.objective(*x);
      if (!best || obj < best->objective) best = VertexResult{obj, *x};
    }
    int k = need - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == m - need + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int t = k + 1; t < need; ++t) pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t) - 1] + 1;
  }
  return best;
}

}  // namespace eva::testing
