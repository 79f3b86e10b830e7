#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mdplook/linear.hpp"
#include "mdplook/mdp.hpp"
#include "mdplook/parallel.hpp"

namespace mdplook {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
using ValueFunction = std::vector<T>;

struct GainBias {
  double gain = 0;
  std::vector<double> bias;  // normalized so bias[reference] == 0
  int reference = 0;
};

struct DiscountedSolve {
  ValueFunction<double> v;
  Policy<double> policy;
  int iterations = 0;
  double residual = 0;  // bellman residual of the returned v
};

struct AverageSolve {
  GainBias gb;
  Policy<double> policy;
  int iterations = 0;
  double residual = 0;  // optimality-equation residual
};

namespace detail {

// Sparse per-(action,state) rows speed up backups on augmented models whose
// kernels are mostly zeros.
template <class T>
SparseRows<T> action_rows(const Mdp<T>& mdp, int a) {
  const int S = mdp.num_states();
  SparseRows<T> rows(S);
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < S; ++t)
      if (!numeric_traits<T>::is_zero(mdp.kernel[a][s][t])) rows[s].push_back({t, mdp.kernel[a][s][t]});
  return rows;
}

template <class T>
SparseRows<T> policy_rows(const Mdp<T>& mdp, const Policy<T>& pi) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  SparseRows<T> rows(S);
  for (int s = 0; s < S; ++s) {
    std::vector<T> dense(S, T(0));
    for (int a = 0; a < A; ++a) {
      const T w = pi.prob(s, a);
      if (numeric_traits<T>::is_zero(w)) continue;
      for (int t = 0; t < S; ++t) dense[t] += w * mdp.kernel[a][s][t];
    }
    for (int t = 0; t < S; ++t)
      if (!numeric_traits<T>::is_zero(dense[t])) rows[s].push_back({t, dense[t]});
  }
  return rows;
}

template <class T>
std::vector<T> policy_rewards(const Mdp<T>& mdp, const Policy<T>& pi) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<T> r(S, T(0));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      const T w = pi.prob(s, a);
      if (!numeric_traits<T>::is_zero(w)) r[s] += w * mdp.rewards[s][a];
    }
  return r;
}

inline double span(const std::vector<double>& d) {
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  return *hi - *lo;
}

}  // namespace detail

// Classical Bellman backup; argmax ties break toward the smallest action
// index so results are reproducible.
inline void bellman_backup(const std::vector<SparseRows<double>>& rows,
                           const std::vector<std::vector<double>>& rewards, double gamma,
                           const std::vector<double>& v, std::vector<double>& out,
                           std::vector<int>* argmax, int threads) {
  const int S = static_cast<int>(rewards.size());
  const int A = static_cast<int>(rows.size());
  parallel_for(S, threads, [&](int s) {
    double best = 0;
    int best_a = 0;
    for (int a = 0; a < A; ++a) {
      double q = rewards[s][a];
      for (const auto& [t, p] : rows[a][s]) q += gamma * p * v[t];
      if (a == 0 || q > best) {
        best = q;
        best_a = a;
      }
    }
    out[s] = best;
    if (argmax) (*argmax)[s] = best_a;
  });
}

// Stops when successive iterates differ by at most eps*(1-gamma)/(2*gamma),
// which bounds the sup-norm error of the returned v by eps.
inline DiscountedSolve value_iteration_discounted(const MdpF& mdp, double gamma, double eps,
                                                  int threads = 1, long long max_iters = 10000000) {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<SparseRows<double>> rows;
  rows.reserve(A);
  for (int a = 0; a < A; ++a) rows.push_back(detail::action_rows(mdp, a));

  const double stop = eps * (1 - gamma) / (2 * gamma);
  std::vector<double> v(S, 0.0), next(S, 0.0);
  std::vector<int> greedy(S, 0);
  DiscountedSolve out;
  for (long long it = 1; it <= max_iters; ++it) {
    bellman_backup(rows, mdp.rewards, gamma, v, next, &greedy, threads);
    double diff = 0;
    for (int s = 0; s < S; ++s) diff = std::max(diff, std::fabs(next[s] - v[s]));
    v.swap(next);
    if (diff <= stop) {
      out.v = v;
      out.policy.deterministic = true;
      out.policy.choice = greedy;
      out.iterations = static_cast<int>(it);
      bellman_backup(rows, mdp.rewards, gamma, v, next, nullptr, threads);
      for (int s = 0; s < S; ++s) out.residual = std::max(out.residual, std::fabs(next[s] - v[s]));
      return out;
    }
  }
  throw ConvergenceError("value iteration exceeded the iteration cap");
}

// Direct solve of (I - gamma * P_pi) v = r_pi; exact in rational mode.
template <class T>
ValueFunction<T> policy_evaluation_discounted(const Mdp<T>& mdp, const Policy<T>& pi,
                                              const T& gamma) {
  if (!(gamma > T(0) && gamma < T(1))) throw std::invalid_argument("gamma must lie in (0,1)");
  SparseRows<T> rows = detail::policy_rows(mdp, pi);
  for (auto& row : rows)
    for (auto& [t, p] : row) p *= gamma;
  return solve_markov_system(rows, detail::policy_rewards(mdp, pi));
}

// Long-run average reward of a fixed policy through its stationary
// distribution; fails on chains with more than one closed class.
template <class T>
T policy_average_gain(const Mdp<T>& mdp, const Policy<T>& pi) {
  SparseRows<T> rows = detail::policy_rows(mdp, pi);
  std::vector<T> mu = stationary_distribution(rows);
  std::vector<T> r = detail::policy_rewards(mdp, pi);
  T g = 0;
  for (std::size_t s = 0; s < mu.size(); ++s) g += mu[s] * r[s];
  return g;
}

// Optimal gain/bias by relative value iteration. Iterates on the
// half-lazy kernel (I + P)/2, which has the same gain and 2x the bias and is
// aperiodic, so the iteration converges on periodic unichain instances too.
inline AverageSolve average_reward_solve(const MdpF& mdp, double span_tol = 1e-9,
                                         long long max_iters = 1000000, int reference = 0,
                                         int threads = 1) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<SparseRows<double>> lazy(A);
  for (int a = 0; a < A; ++a) {
    lazy[a] = detail::action_rows(mdp, a);
    for (int s = 0; s < S; ++s) {
      for (auto& [t, p] : lazy[a][s]) p *= 0.5;
      bool found = false;
      for (auto& [t, p] : lazy[a][s])
        if (t == s) {
          p += 0.5;
          found = true;
        }
      if (!found) lazy[a][s].push_back({s, 0.5});
    }
  }

  std::vector<double> h(S, 0.0), u(S, 0.0);
  std::vector<int> greedy(S, 0);
  AverageSolve out;
  out.gb.reference = reference;
  for (long long it = 1; it <= max_iters; ++it) {
    bellman_backup(lazy, mdp.rewards, 1.0, h, u, &greedy, threads);
    const double offset = u[reference];
    double lo = u[0] - h[0], hi = u[0] - h[0];
    for (int s = 0; s < S; ++s) {
      const double d = u[s] - h[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      h[s] = u[s] - offset;
    }
    if (hi - lo <= span_tol) {
      out.gb.gain = offset;
      out.gb.bias.assign(S, 0.0);
      for (int s = 0; s < S; ++s) out.gb.bias[s] = 0.5 * h[s];  // undo the lazy bias doubling
      out.policy.deterministic = true;
      out.policy.choice = greedy;
      out.iterations = static_cast<int>(it);
      // residual of the original optimality equation
      for (int s = 0; s < S; ++s) {
        double best = 0;
        for (int a = 0; a < A; ++a) {
          double q = mdp.rewards[s][a];
          for (int t = 0; t < S; ++t) q += mdp.kernel[a][s][t] * out.gb.bias[t];
          if (a == 0 || q > best) best = q;
        }
        out.residual = std::max(out.residual, std::fabs(out.gb.gain + out.gb.bias[s] - best));
      }
      return out;
    }
  }
  throw ConvergenceError("relative value iteration exceeded the iteration cap");
}

}  // namespace mdplook
