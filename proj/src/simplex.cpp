#include "braess/detail/simplex.hpp"

#include "braess/errors.hpp"

namespace braess::detail {

namespace {

// Dense tableau: rows[i] = (coeffs..., rhs). basis[i] = column basic in row i.
struct Tableau {
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> cost;  // reduced-cost row, cost.back() = -objective
  std::vector<int> basis;

  void pivot(int row, int col) {
    auto& pr = rows[row];
    Rational inv = 1 / pr[col];
    for (auto& v : pr) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == row || rows[i][col] == 0) continue;
      Rational factor = rows[i][col];
      for (std::size_t j = 0; j < pr.size(); ++j) rows[i][j] -= factor * pr[j];
    }
    if (cost[col] != 0) {
      Rational factor = cost[col];
      for (std::size_t j = 0; j < pr.size(); ++j) cost[j] -= factor * pr[j];
    }
    basis[row] = col;
  }

  // Bland's rule: entering = lowest-index negative reduced cost; leaving =
  // min ratio, ties by lowest basic variable index. Returns false at optimum.
  bool step(std::size_t num_cols) {
    int enter = -1;
    for (std::size_t j = 0; j < num_cols; ++j)
      if (cost[j] < 0) {
        enter = static_cast<int>(j);
        break;
      }
    if (enter < 0) return false;
    int leave = -1;
    Rational best_ratio = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][enter] <= 0) continue;
      Rational ratio = rows[i].back() / rows[i][enter];
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = static_cast<int>(i);
        best_ratio = ratio;
      }
    }
    if (leave < 0) fail(ErrorKind::Internal, "unbounded pivot in bounded system");
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpResult solve_lp_min(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                      const std::vector<Rational>& c) {
  std::size_t m = a.size();
  std::size_t n = c.size();
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0) {
      for (auto& v : a[i]) v = -v;
      b[i] = -b[i];
    }

  // phase 1: minimize the sum of one artificial per row
  Tableau t;
  t.rows.assign(m, std::vector<Rational>(n + m + 1, Rational(0)));
  t.basis.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = a[i][j];
    t.rows[i][n + i] = 1;
    t.rows[i].back() = b[i];
    t.basis[i] = static_cast<int>(n + i);
  }
  t.cost.assign(n + m + 1, Rational(0));
  for (std::size_t j = n; j < n + m; ++j) t.cost[j] = 1;
  for (std::size_t i = 0; i < m; ++i)  // price out the artificial basis
    for (std::size_t j = 0; j <= n + m; ++j) t.cost[j] -= t.rows[i][j];
  while (t.step(n + m)) {
  }
  if (-t.cost.back() != 0) return {LpStatus::Infeasible, {}, 0};

  // drive leftover artificials out of the basis (degenerate rows)
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < static_cast<int>(n)) continue;
    int col = -1;
    for (std::size_t j = 0; j < n; ++j)
      if (t.rows[i][j] != 0) {
        col = static_cast<int>(j);
        break;
      }
    if (col >= 0) t.pivot(static_cast<int>(i), col);
    // an all-zero structural row is redundant; the artificial stays basic at 0
  }

  // phase 2 over the structural columns only
  t.cost.assign(n + m + 1, Rational(0));
  for (std::size_t j = 0; j < n; ++j) t.cost[j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] >= static_cast<int>(n) || t.cost[t.basis[i]] == 0) continue;
    Rational factor = t.cost[t.basis[i]];
    for (std::size_t j = 0; j <= n + m; ++j) t.cost[j] -= factor * t.rows[i][j];
  }
  while (t.step(n)) {
  }

  LpResult result;
  result.status = LpStatus::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] < static_cast<int>(n)) result.x[t.basis[i]] = t.rows[i].back();
  result.objective = -t.cost.back();
  return result;
}

}  // namespace braess::detail
