#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "mdplook/augment.hpp"
#include "mdplook/mdp.hpp"
#include "mdplook/parallel.hpp"
#include "mdplook/planners.hpp"
#include "mdplook/simplex.hpp"

namespace mdplook {

// Score over (next state, action) pairs; u[s'][a] plays the role of
// r(s,a) + gamma*v(s') (discounted) or r(s,a) + h(s') (average) for a fixed
// context state s.
template <class T>
using ScoreMatrix = std::vector<std::vector<T>>;

struct ScoredPair {
  int state = 0;
  int action = 0;
};
using OrderingList = std::vector<ScoredPair>;

// P(p | s) = prod_a P_a(p[a] | s): the next-state vector components are drawn
// independently per action.
template <class T>
T product_lookahead_prob(const Mdp<T>& mdp, int s, const std::vector<int>& p) {
  if (static_cast<int>(p.size()) != mdp.num_actions())
    throw std::invalid_argument("next-state vector must be total over actions");
  T prob = 1;
  for (int a = 0; a < mdp.num_actions(); ++a) prob *= mdp.kernel[a][s][p[a]];
  return prob;
}

// E_{p ~ P(.|s)}[ max_a u(p(a), a) ] by enumerating all |S|^|A| vectors.
template <class T>
T expected_max_bruteforce(const Mdp<T>& mdp, int s, const ScoreMatrix<T>& u,
                          long long budget = 1000000) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  double combos = std::pow(static_cast<double>(S), static_cast<double>(A));
  if (combos > static_cast<double>(budget))
    throw BudgetError("next-state vector enumeration exceeds budget");

  T total = 0;
  std::vector<int> p(A, 0);
  while (true) {
    T prob = 1;
    for (int a = 0; a < A; ++a) {
      prob *= mdp.kernel[a][s][p[a]];
      if (numeric_traits<T>::is_zero(prob)) break;
    }
    if (!numeric_traits<T>::is_zero(prob)) {
      T best = u[p[0]][0];
      for (int a = 1; a < A; ++a)
        if (u[p[a]][a] > best) best = u[p[a]][a];
      total += prob * best;
    }
    int pos = 0;
    while (pos < A && ++p[pos] == S) p[pos++] = 0;
    if (pos == A) break;
  }
  return total;
}

// All (state, action) pairs sorted by score descending; equal scores ordered
// by (state index, action index) so the list is unique.
template <class T>
OrderingList make_score_ordering(const ScoreMatrix<T>& u, int S, int A) {
  OrderingList m;
  m.reserve(static_cast<std::size_t>(S) * A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) m.push_back({s, a});
  std::stable_sort(m.begin(), m.end(), [&](const ScoredPair& x, const ScoredPair& y) {
    if (u[x.state][x.action] != u[y.state][y.action]) return u[y.state][y.action] < u[x.state][x.action];
    if (x.state != y.state) return x.state < y.state;
    return x.action < y.action;
  });
  return m;
}

// mu[i] = P[p(a_j) != s_j for all j<i and p(a_i) = s_i | s]: the probability
// that position i holds the first matching pair under ordering m. Maintains
// the per-action forbidden mass incrementally: O(SA * |A|) for the full list.
template <class T>
std::vector<T> event_probabilities(const Mdp<T>& mdp, int s, const OrderingList& m) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (static_cast<int>(m.size()) != S * A) throw std::invalid_argument("ordering must cover all pairs");
  std::vector<char> used(static_cast<std::size_t>(S) * A, 0);
  for (const auto& pair : m) {
    auto& flag = used[static_cast<std::size_t>(pair.state) * A + pair.action];
    if (flag) throw std::invalid_argument("ordering repeats a pair");
    flag = 1;
  }

  std::vector<T> keep(A, T(1));  // per action: probability no earlier pair of that action matched
  std::vector<T> mu(m.size(), T(0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int si = m[i].state;
    const int ai = m[i].action;
    T prob = mdp.kernel[ai][s][si];
    for (int a = 0; a < A; ++a)
      if (a != ai) prob *= keep[a];
    mu[i] = prob;
    keep[ai] -= mdp.kernel[ai][s][si];
  }
  return mu;
}

template <class T>
T event_probability(const Mdp<T>& mdp, int s, const OrderingList& m, int i) {
  return event_probabilities(mdp, s, m)[i];
}

// Same expectation as the brute force, via the first-match partition of the
// score-sorted ordering: O(SA log SA + SA*|A|).
template <class T>
T expected_max_sorted(const Mdp<T>& mdp, int s, const ScoreMatrix<T>& u) {
  const OrderingList m = make_score_ordering(u, mdp.num_states(), mdp.num_actions());
  const std::vector<T> mu = event_probabilities(mdp, s, m);
  T total = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!numeric_traits<T>::is_zero(mu[i])) total += mu[i] * u[m[i].state][m[i].action];
  return total;
}

template <class T>
ScoreMatrix<T> discounted_score(const Mdp<T>& mdp, int s, const T& gamma,
                                const std::vector<T>& v) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  ScoreMatrix<T> u(S, std::vector<T>(A));
  for (int t = 0; t < S; ++t)
    for (int a = 0; a < A; ++a) u[t][a] = mdp.rewards[s][a] + gamma * v[t];
  return u;
}

template <class T>
ScoreMatrix<T> average_score(const Mdp<T>& mdp, int s, const std::vector<T>& h) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  ScoreMatrix<T> u(S, std::vector<T>(A));
  for (int t = 0; t < S; ++t)
    for (int a = 0; a < A; ++a) u[t][a] = mdp.rewards[s][a] + h[t];
  return u;
}

// (Tv)(s) = E_{p ~ P(.|s)}[ max_a { r(s,a) + gamma * v(p(a)) } ], the
// one-step-look-ahead Bellman operator; a gamma-contraction.
template <class T>
std::vector<T> reduced_bellman_operator(const Mdp<T>& mdp, const T& gamma,
                                        const std::vector<T>& v, int threads = 1) {
  const int S = mdp.num_states();
  std::vector<T> out(S, T(0));
  parallel_for(S, threads, [&](int s) {
    out[s] = expected_max_sorted(mdp, s, discounted_score(mdp, s, gamma, v));
  });
  return out;
}

struct OneStepDiscountedSolve {
  std::vector<double> v;
  int iterations = 0;
  double residual = 0;
};

// Fixed point of the reduced operator, same stopping rule as classical value
// iteration, so ||v - v*||_inf <= eps.
inline OneStepDiscountedSolve solve_onestep_discounted(const MdpF& mdp, double gamma, double eps,
                                                       int threads = 1,
                                                       long long max_iters = 10000000) {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in (0,1)");
  const int S = mdp.num_states();
  const double stop = eps * (1 - gamma) / (2 * gamma);
  OneStepDiscountedSolve out;
  std::vector<double> v(S, 0.0);
  for (long long it = 1; it <= max_iters; ++it) {
    std::vector<double> next = reduced_bellman_operator(mdp, gamma, v, threads);
    double diff = 0;
    for (int s = 0; s < S; ++s) diff = std::max(diff, std::fabs(next[s] - v[s]));
    v.swap(next);
    if (diff <= stop) {
      out.v = v;
      out.iterations = static_cast<int>(it);
      std::vector<double> tv = reduced_bellman_operator(mdp, gamma, v, threads);
      for (int s = 0; s < S; ++s) out.residual = std::max(out.residual, std::fabs(tv[s] - v[s]));
      return out;
    }
  }
  throw ConvergenceError("one-step fixed-point iteration exceeded the iteration cap");
}

// One linear constraint v(s) >= sum_i mu_i (r(s, a_i) + gamma v(s_i)),
// rearranged to coef . v >= rhs.
struct SeparationCut {
  int state = 0;
  OrderingList ordering;
  std::vector<double> coef;
  double rhs = 0;
  double violation = 0;
};

struct SeparationResult {
  bool feasible = true;
  double max_violation = 0;
  std::optional<SeparationCut> cut;  // first violated state in index order
};

// For each state, the score-sorted ordering yields the tightest constraint of
// the whole ordering family; checking it decides feasibility for the family.
inline SeparationResult separation_oracle(const MdpF& mdp, double gamma,
                                          const std::vector<double>& v, double tol = 1e-9) {
  const int S = mdp.num_states();
  SeparationResult res;
  for (int s = 0; s < S; ++s) {
    const ScoreMatrix<double> u = discounted_score(mdp, s, gamma, v);
    const OrderingList m = make_score_ordering(u, S, mdp.num_actions());
    const std::vector<double> mu = event_probabilities(mdp, s, m);
    double rhs_value = 0;
    for (std::size_t i = 0; i < m.size(); ++i) rhs_value += mu[i] * u[m[i].state][m[i].action];
    const double violation = rhs_value - v[s];
    res.max_violation = std::max(res.max_violation, violation);
    if (violation > tol && !res.cut) {
      SeparationCut cut;
      cut.state = s;
      cut.ordering = m;
      cut.coef.assign(S, 0.0);
      cut.coef[s] += 1.0;
      cut.rhs = 0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        cut.coef[m[i].state] -= gamma * mu[i];
        cut.rhs += mu[i] * mdp.rewards[s][m[i].action];
      }
      cut.violation = violation;
      res.cut = std::move(cut);
      res.feasible = false;
    }
  }
  res.feasible = !res.cut.has_value();
  return res;
}

struct CgSolve {
  std::vector<double> v;
  bool converged = false;
  int cuts = 0;
  int oracle_calls = 0;
  int lp_iterations = 0;
  double final_violation = 0;
};

// Constraint generation for the look-ahead LP: minimize the weighted sum of
// values inside the box 0 <= v <= r_max/(1-gamma), repeatedly adding the
// oracle's violated constraint until the oracle accepts the optimizer.
// The iteration cap is 10*|S|^2*|A|; hitting it returns the last iterate
// with converged=false.
inline CgSolve solve_onestep_discounted_cg(const MdpF& mdp, double gamma,
                                           std::vector<double> weights = {},
                                           double feas_tol = 1e-9) {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in (0,1)");
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (weights.empty()) weights.assign(S, 1.0 / S);
  if (static_cast<int>(weights.size()) != S) throw std::invalid_argument("one weight per state");
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("weights must be strictly positive");

  const double upper = mdp.r_max / (1 - gamma);
  std::vector<double> objective(S);
  for (int s = 0; s < S; ++s) objective[s] = (1 - gamma) * weights[s];

  std::vector<LpConstraint> rows;
  for (int s = 0; s < S; ++s) {
    LpConstraint box;
    box.coef.assign(S, 0.0);
    box.coef[s] = 1.0;
    box.sense = LpSense::Le;
    box.rhs = upper;
    rows.push_back(std::move(box));
  }

  CgSolve out;
  const int cap = 10 * S * S * A;
  for (int round = 0; round <= cap; ++round) {
    LpResult lp = simplex_solve(objective, rows);
    out.lp_iterations += lp.iterations;
    if (lp.status != LpStatus::Optimal)
      throw ConvergenceError("restricted LP solve failed unexpectedly");
    SeparationResult sep = separation_oracle(mdp, gamma, lp.x, feas_tol);
    ++out.oracle_calls;
    out.v = lp.x;
    out.final_violation = sep.max_violation;
    if (sep.feasible) {
      out.converged = true;
      return out;
    }
    LpConstraint row;
    row.coef = sep.cut->coef;
    row.sense = LpSense::Ge;
    row.rhs = sep.cut->rhs;
    rows.push_back(std::move(row));
    ++out.cuts;
  }
  return out;  // cap exceeded: converged stays false, last iterate preserved
}

// vbar(s, p) = max_a { r(s,a) + gamma v(p(a)) }.
template <class T>
T augmented_value(const Mdp<T>& mdp, const T& gamma, const std::vector<T>& v, int s,
                  const std::vector<int>& p) {
  if (static_cast<int>(p.size()) != mdp.num_actions())
    throw std::invalid_argument("next-state vector must be total over actions");
  T best = mdp.rewards[s][0] + gamma * v[p[0]];
  for (int a = 1; a < mdp.num_actions(); ++a) {
    const T q = mdp.rewards[s][a] + gamma * v[p[a]];
    if (q > best) best = q;
  }
  return best;
}

// Greedy action per depth-1 augmented state of a built augmented model, from
// a base-state value function; ties break toward the smallest action index.
template <class T>
Policy<T> greedy_lookahead_policy(const Mdp<T>& mdp, const T& gamma, const std::vector<T>& v,
                                  const AugmentedBuild<T>& aug) {
  Policy<T> pi;
  pi.deterministic = true;
  pi.choice.assign(aug.mdp.num_states(), 0);
  for (int i = 0; i < aug.mdp.num_states(); ++i) {
    const AugmentedState& xi = aug.decoded[i];
    if (xi.depth() != 1) throw std::invalid_argument("expected a depth-1 augmented model");
    const int s = xi.root();
    int best_a = 0;
    T best = mdp.rewards[s][0] + gamma * v[xi.blocks[1][0]];
    for (int a = 1; a < mdp.num_actions(); ++a) {
      const T q = mdp.rewards[s][a] + gamma * v[xi.blocks[1][a]];
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    pi.choice[i] = best_a;
  }
  return pi;
}

struct OneStepAverageSolve {
  GainBias gb;
  int iterations = 0;
  double residual = 0;
};

// Damped relative iteration on the reduced average-reward operator
// (Th)(s) = E_p[ max_a { r(s,a) + h(p(a)) } ]: h <- (1-tau) h + tau (Th - Th(ref)).
// The fixed point solves g + h = Th with h(ref) = 0, g = Th(ref); damping
// keeps periodic instances from oscillating.
inline OneStepAverageSolve solve_onestep_average(const MdpF& mdp, double span_tol = 1e-9,
                                                 long long max_iters = 1000000, int reference = 0,
                                                 int threads = 1) {
  const int S = mdp.num_states();
  const double tau = 0.5;
  std::vector<double> h(S, 0.0);
  OneStepAverageSolve out;
  out.gb.reference = reference;
  for (long long it = 1; it <= max_iters; ++it) {
    std::vector<double> th(S, 0.0);
    parallel_for(S, threads, [&](int s) {
      th[s] = expected_max_sorted(mdp, s, average_score(mdp, s, h));
    });
    double lo = th[0] - h[0], hi = th[0] - h[0];
    for (int s = 0; s < S; ++s) {
      const double d = th[s] - h[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double offset = th[reference];
    for (int s = 0; s < S; ++s) h[s] = (1 - tau) * h[s] + tau * (th[s] - offset);
    if (hi - lo <= span_tol) {
      out.gb.gain = offset;  // g = Th(ref) with h(ref) = 0 at the fixed point
      out.gb.bias = h;
      out.iterations = static_cast<int>(it);
      std::vector<double> th2(S, 0.0);
      parallel_for(S, threads, [&](int s) {
        th2[s] = expected_max_sorted(mdp, s, average_score(mdp, s, h));
      });
      for (int s = 0; s < S; ++s)
        out.residual = std::max(out.residual, std::fabs(out.gb.gain + h[s] - th2[s]));
      return out;
    }
  }
  throw ConvergenceError("reduced average-reward iteration exceeded the iteration cap");
}

struct AverageCgSolve {
  GainBias gb;
  bool converged = false;
  bool box_hit = false;
  int cuts = 0;
  int lp_iterations = 0;
};

// Constraint-generation mirror of the average-reward reduced solve:
// minimize g subject to g + h(s) >= E_p[max_a{r(s,a)+h(p(a))}] with
// h(ref) = 0, h split into nonnegative parts inside a wide box. A binding
// box is reported, not silently accepted.
inline AverageCgSolve solve_onestep_average_cg(const MdpF& mdp, double feas_tol = 1e-9,
                                               int reference = 0) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  // variables: g, hp[s], hm[s] for s != ref (h = hp - hm)
  const int nh = S - 1;
  const int nvar = 1 + 2 * nh;
  const double box = 1000.0 * (mdp.r_max + 1.0);
  auto hcol = [&](int s) { return s < reference ? s : s - 1; };  // dense h index

  std::vector<double> objective(nvar, 0.0);
  objective[0] = 1.0;

  std::vector<LpConstraint> rows;
  for (int i = 0; i < 2 * nh; ++i) {
    LpConstraint r;
    r.coef.assign(nvar, 0.0);
    r.coef[1 + i] = 1.0;
    r.sense = LpSense::Le;
    r.rhs = box;
    rows.push_back(std::move(r));
  }

  AverageCgSolve out;
  out.gb.reference = reference;
  const int cap = 10 * S * S * A;
  std::vector<double> g_h(S, 0.0);
  double gain = 0;
  for (int round = 0; round <= cap; ++round) {
    LpResult lp = simplex_solve(objective, rows);
    out.lp_iterations += lp.iterations;
    if (lp.status != LpStatus::Optimal)
      throw ConvergenceError("restricted LP solve failed unexpectedly");
    gain = lp.x[0];
    for (int s = 0; s < S; ++s)
      g_h[s] = s == reference ? 0.0 : lp.x[1 + hcol(s)] - lp.x[1 + nh + hcol(s)];

    // oracle: tightest ordering per state on the average score
    int violated = -1;
    OrderingList vm;
    std::vector<double> vmu;
    for (int s = 0; s < S; ++s) {
      const ScoreMatrix<double> u = average_score(mdp, s, g_h);
      const OrderingList m = make_score_ordering(u, S, A);
      const std::vector<double> mu = event_probabilities(mdp, s, m);
      double rhs_value = 0;
      for (std::size_t i = 0; i < m.size(); ++i) rhs_value += mu[i] * u[m[i].state][m[i].action];
      if (rhs_value - (gain + g_h[s]) > feas_tol) {
        violated = s;
        vm = m;
        vmu = mu;
        break;
      }
    }
    if (violated < 0) {
      out.converged = true;
      break;
    }
    LpConstraint row;  // g + h(s) - sum_i mu_i h(s_i) >= sum_i mu_i r(s, a_i)
    row.coef.assign(nvar, 0.0);
    row.coef[0] = 1.0;
    row.sense = LpSense::Ge;
    row.rhs = 0;
    auto add_h = [&](int s, double w) {
      if (s == reference) return;
      row.coef[1 + hcol(s)] += w;
      row.coef[1 + nh + hcol(s)] -= w;
    };
    add_h(violated, 1.0);
    for (std::size_t i = 0; i < vm.size(); ++i) {
      add_h(vm[i].state, -vmu[i]);
      row.rhs += vmu[i] * mdp.rewards[violated][vm[i].action];
    }
    rows.push_back(std::move(row));
    ++out.cuts;
  }
  out.gb.gain = gain;
  out.gb.bias = g_h;
  for (int s = 0; s < S; ++s)
    if (s != reference && std::fabs(g_h[s]) > 0.99 * 1000.0 * (mdp.r_max + 1.0)) out.box_hit = true;
  return out;
}

}  // namespace mdplook
