#pragma once

#include <vector>

namespace mdplook {

enum class LpSense { Ge, Le, Eq };

struct LpConstraint {
  std::vector<double> coef;
  LpSense sense = LpSense::Ge;
  double rhs = 0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0;
  int iterations = 0;
};

// Minimizes c.x subject to the constraints and x >= 0, by a dense two-phase
// tableau simplex. Bland's rule (smallest eligible index) prevents cycling.
LpResult simplex_solve(const std::vector<double>& objective,
                       const std::vector<LpConstraint>& constraints, int iter_limit = 200000);

}  // namespace mdplook
