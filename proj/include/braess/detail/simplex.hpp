#pragma once

#include <vector>

#include "braess/rational.hpp"

namespace braess::detail {

// Exact rational two-phase simplex with Bland's rule, for the small per-cut
// equality systems. Minimizes c.x subject to A x = b, x >= 0.
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> x;
  Rational objective = 0;
};

LpResult solve_lp_min(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                      const std::vector<Rational>& c);

}  // namespace braess::detail
