#pragma once

#include <optional>
#include <vector>

#include "boxworld/rational.hpp"

namespace boxworld {

/// Dense row-major system A z = b over the rationals.
struct LinearSystem {
  std::size_t columns = 0;
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;

  void add_row(std::vector<Rational> row, Rational b) {
    if (row.size() != columns) throw StructuralError("LinearSystem: row width mismatch");
    rows.push_back(std::move(row));
    rhs.push_back(std::move(b));
  }
};

struct LpResult {
  bool feasible = false;
  std::vector<Rational> point;  ///< z >= 0 with A z = b, when feasible
  std::size_t pivots = 0;
};

/// Decides { z >= 0 : A z = b } exactly with a phase-1 simplex (one artificial
/// variable per row, Bland's rule for entering and leaving variables).
/// Artificial columns are discarded once they leave the basis.
inline LpResult lp_feasibility(const LinearSystem& system) {
  const std::size_t m = system.rows.size(), n = system.columns;
  if (system.rhs.size() != m) throw StructuralError("lp_feasibility: rhs size mismatch");

  std::vector<std::vector<Rational>> t = system.rows;
  std::vector<Rational> b = system.rhs;
  for (std::size_t i = 0; i < m; ++i) {
    if (t[i].size() != n) throw StructuralError("lp_feasibility: ragged matrix");
    if (sgn(b[i]) < 0) {
      b[i] = -b[i];
      for (auto& v : t[i]) v = -v;
    }
  }

  // basis[i] < n: structural column; basis[i] == n + i: artificial of row i.
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Phase-1 reduced costs d_j = -sum over artificial-basic rows of t[i][j].
  std::vector<Rational> cost(n);
  Rational objective = 0;  // sum of artificial values
  for (std::size_t i = 0; i < m; ++i) {
    objective += b[i];
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(t[i][j]) != 0) cost[j] -= t[i][j];
  }

  LpResult result;
  std::vector<std::size_t> row_nz, col_nz;
  while (sgn(objective) != 0) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(cost[j]) < 0) {
        enter = j;
        break;
      }
    if (enter == n) break;  // optimal with positive artificial sum

    std::size_t leave = m;
    Rational best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(t[i][enter]) <= 0) continue;
      Rational ratio = b[i] / t[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = std::move(ratio);
      }
    }
    if (leave == m) break;  // cannot happen in phase 1: objective is bounded below

    const Rational pivot = t[leave][enter];
    row_nz.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(t[leave][j]) != 0) {
        t[leave][j] /= pivot;
        row_nz.push_back(j);
      }
    b[leave] /= pivot;

    col_nz.clear();
    for (std::size_t i = 0; i < m; ++i)
      if (i != leave && sgn(t[i][enter]) != 0) col_nz.push_back(i);
    for (auto i : col_nz) {
      const Rational factor = t[i][enter];
      for (auto j : row_nz) t[i][j] -= factor * t[leave][j];
      b[i] -= factor * b[leave];
    }
    if (sgn(cost[enter]) != 0) {
      const Rational factor = cost[enter];
      for (auto j : row_nz) cost[j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
    objective = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= n) objective += b[i];
    ++result.pivots;
  }

  if (sgn(objective) != 0) return result;
  result.feasible = true;
  result.point.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) result.point[basis[i]] = b[i];
  return result;
}

}  // namespace boxworld
