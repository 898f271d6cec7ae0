#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dsgrn/rational.hpp"

namespace dsgrn::lp {

using Row = std::vector<Rational>;

/// Exact phase-one simplex: finds x >= 0 with rows[i] . x <= rhs[i], or
/// reports infeasibility. Bland's rule guarantees termination.
inline std::optional<std::vector<Rational>> find_feasible(const std::vector<Row>& rows,
                                                          const std::vector<Rational>& rhs,
                                                          std::size_t n_vars) {
  const std::size_t m = rows.size();
  std::size_t n_art = 0;
  for (const auto& h : rhs)
    if (h < 0) ++n_art;
  const std::size_t n_cols = n_vars + m + n_art;
  const std::size_t rhs_col = n_cols;

  std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(n_cols + 1));
  std::vector<std::size_t> basis(m);
  std::vector<bool> artificial(n_cols, false);
  std::size_t next_art = n_vars + m;
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = rhs[i] < 0;
    const int s = flip ? -1 : 1;
    for (std::size_t j = 0; j < n_vars; ++j) t[i][j] = s * rows[i][j];
    t[i][n_vars + i] = s;
    t[i][rhs_col] = s * rhs[i];
    if (flip) {
      t[i][next_art] = 1;
      artificial[next_art] = true;
      basis[i] = next_art++;
    } else {
      basis[i] = n_vars + i;
    }
  }
  // Objective row holds reduced costs of "minimise the sum of artificials".
  auto& obj = t[m];
  for (std::size_t j = 0; j <= n_cols; ++j) {
    Rational r = (j < n_cols && artificial[j]) ? Rational(1) : Rational(0);
    for (std::size_t i = 0; i < m; ++i)
      if (artificial[basis[i]]) r -= t[i][j];
    obj[j] = r;
  }

  for (;;) {
    std::size_t enter = n_cols;
    for (std::size_t j = 0; j < n_cols; ++j)
      if (obj[j] < 0) {
        enter = j;
        break;
      }
    if (enter == n_cols) break;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][rhs_col] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one

    const Rational pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j <= n_cols; ++j)
        if (t[leave][j] != 0) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  // obj[rhs] = -(sum of artificials)
  if (obj[rhs_col] != 0) return std::nullopt;
  std::vector<Rational> x(n_vars);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n_vars) x[basis[i]] = t[i][rhs_col];
  return x;
}

/// Finds y with every y_k > 0 and rows[i] . y < 0, if one exists. The
/// system is homogeneous, so it is feasible iff some y >= 1 satisfies
/// rows[i] . y <= -1; the returned point satisfies those margins.
inline std::optional<std::vector<Rational>> strict_homogeneous(const std::vector<Row>& rows,
                                                               std::size_t n_vars) {
  std::vector<Rational> rhs;
  rhs.reserve(rows.size());
  for (const auto& r : rows) {
    Rational h = -1;
    for (const auto& c : r) h -= c;
    rhs.push_back(h);
  }
  auto x = find_feasible(rows, rhs, n_vars);
  if (!x) return std::nullopt;
  for (auto& v : *x) v += 1;
  return x;
}

}  // namespace dsgrn::lp
