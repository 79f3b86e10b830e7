#include "mdplook/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdplook {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
  int m = 0;              // rows
  int n = 0;              // structural + slack columns (artificials appended after)
  int cols = 0;           // total columns incl. artificials
  std::vector<std::vector<double>> a;  // m x cols
  std::vector<double> b;               // m
  std::vector<int> basis;              // m, column index basic in each row
};

// One simplex phase on the given cost vector (length tab.cols). Returns
// false on iteration limit. Bland: entering = smallest-index column with
// negative reduced cost; leaving = min ratio, ties by smallest basis column.
LpStatus run_phase(Tableau& tab, const std::vector<double>& cost, int iter_limit,
                   int* iterations, bool allow_unbounded) {
  const int m = tab.m;
  const int cols = tab.cols;
  std::vector<double> y(m);

  while (true) {
    if (*iterations >= iter_limit) return LpStatus::IterLimit;

    // reduced costs via basis cost row: z_j = c_j - sum_i c_B(i) * a(i,j)
    for (int i = 0; i < m; ++i) y[i] = cost[tab.basis[i]];
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      double z = cost[j];
      for (int i = 0; i < m; ++i)
        if (y[i] != 0.0) z -= y[i] * tab.a[i][j];
      if (z < -kCostTol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (tab.a[i][enter] > kPivotTol) {
        const double ratio = tab.b[i] / tab.a[i][enter];
        if (ratio < best_ratio - 1e-15 ||
            (std::fabs(ratio - best_ratio) <= 1e-15 &&
             (leave < 0 || tab.basis[i] < tab.basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return allow_unbounded ? LpStatus::Unbounded : LpStatus::Infeasible;

    // pivot on (leave, enter)
    ++*iterations;
    const double piv = tab.a[leave][enter];
    for (int j = 0; j < cols; ++j) tab.a[leave][j] /= piv;
    tab.b[leave] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = tab.a[i][enter];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) tab.a[i][j] -= f * tab.a[leave][j];
      tab.b[i] -= f * tab.b[leave];
    }
    tab.basis[leave] = enter;
  }
}

}  // namespace

LpResult simplex_solve(const std::vector<double>& objective,
                       const std::vector<LpConstraint>& constraints, int iter_limit) {
  const int nvar = static_cast<int>(objective.size());
  const int m = static_cast<int>(constraints.size());
  LpResult res;

  // Count slack columns and normalize rhs signs.
  int nslack = 0;
  for (const auto& c : constraints) {
    if (static_cast<int>(c.coef.size()) != nvar)
      throw std::invalid_argument("constraint arity mismatch");
    if (c.sense != LpSense::Eq) ++nslack;
  }

  Tableau tab;
  tab.m = m;
  tab.n = nvar + nslack;
  tab.cols = tab.n + m;  // one artificial per row, unused ones stay nonbasic
  tab.a.assign(m, std::vector<double>(tab.cols, 0.0));
  tab.b.assign(m, 0.0);
  tab.basis.assign(m, -1);

  int slack_at = nvar;
  for (int i = 0; i < m; ++i) {
    const auto& c = constraints[i];
    double sign = 1.0;
    LpSense sense = c.sense;
    if (c.rhs < 0) {
      sign = -1.0;
      if (sense == LpSense::Ge)
        sense = LpSense::Le;
      else if (sense == LpSense::Le)
        sense = LpSense::Ge;
    }
    for (int j = 0; j < nvar; ++j) tab.a[i][j] = sign * c.coef[j];
    tab.b[i] = sign * c.rhs;
    if (c.sense != LpSense::Eq) {
      tab.a[i][slack_at] = (sense == LpSense::Le) ? 1.0 : -1.0;
      if (sense == LpSense::Le) tab.basis[i] = slack_at;
      ++slack_at;
    }
    if (tab.basis[i] < 0) {
      // surplus or equality row: seed an artificial basic variable
      tab.a[i][tab.n + i] = 1.0;
      tab.basis[i] = tab.n + i;
    }
  }

  // Phase 1: minimize the sum of artificials actually in use.
  bool need_phase1 = false;
  std::vector<double> cost1(tab.cols, 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] >= tab.n) {
      cost1[tab.basis[i]] = 1.0;
      need_phase1 = true;
    }
  if (need_phase1) {
    LpStatus st = run_phase(tab, cost1, iter_limit, &res.iterations, false);
    if (st == LpStatus::IterLimit) {
      res.status = st;
      return res;
    }
    double infeas = 0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= tab.n) infeas += tab.b[i];
    if (infeas > 1e-7) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Pivot residual artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < tab.n) continue;
      int enter = -1;
      for (int j = 0; j < tab.n; ++j)
        if (std::fabs(tab.a[i][j]) > kPivotTol) {
          enter = j;
          break;
        }
      if (enter < 0) continue;  // redundant row, harmless degenerate artificial at zero
      const double piv = tab.a[i][enter];
      for (int j = 0; j < tab.cols; ++j) tab.a[i][j] /= piv;
      tab.b[i] /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        const double f = tab.a[r][enter];
        if (f == 0.0) continue;
        for (int j = 0; j < tab.cols; ++j) tab.a[r][j] -= f * tab.a[i][j];
        tab.b[r] -= f * tab.b[i];
      }
      tab.basis[i] = enter;
    }
  }

  // Phase 2: original objective; artificial columns priced out of play.
  std::vector<double> cost2(tab.cols, 0.0);
  for (int j = 0; j < nvar; ++j) cost2[j] = objective[j];
  for (int j = tab.n; j < tab.cols; ++j) cost2[j] = 1e30;
  LpStatus st = run_phase(tab, cost2, iter_limit, &res.iterations, true);
  res.status = st;
  if (st != LpStatus::Optimal) return res;

  res.x.assign(nvar, 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < nvar) res.x[tab.basis[i]] = tab.b[i];
  res.objective = 0;
  for (int j = 0; j < nvar; ++j) res.objective += objective[j] * res.x[j];
  return res;
}

}  // namespace mdplook
