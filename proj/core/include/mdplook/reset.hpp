#pragma once

#include "mdplook/mdp.hpp"
#include "mdplook/planners.hpp"

namespace mdplook {

// Mixes every transition with a probability-(1-gamma) jump into the target
// distribution; rewards unchanged, discount cleared (the result is meant for
// the average criterion). Every state reaches the target each step with
// probability at least 1-gamma, so the result is unichain and aperiodic.
template <class T>
Mdp<T> reset_transform(const Mdp<T>& mdp, const T& gamma, const Distribution<int, T>& target) {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in (0,1)");
  T mass = 0;
  for (const auto& [s, w] : target.support) {
    if (s < 0 || s >= mdp.num_states()) throw std::invalid_argument("reset target out of range");
    if (w < 0) throw std::invalid_argument("reset weights must be nonnegative");
    mass += w;
  }
  if (mass != T(1)) throw std::invalid_argument("reset target must be a distribution");

  Mdp<T> out = mdp;
  out.gamma.reset();
  const T keep = gamma;
  for (int a = 0; a < mdp.num_actions(); ++a)
    for (int s = 0; s < mdp.num_states(); ++s) {
      for (int t = 0; t < mdp.num_states(); ++t) out.kernel[a][s][t] *= keep;
      for (const auto& [t, w] : target.support) out.kernel[a][s][t] += (T(1) - gamma) * w;
    }
  return out;
}

template <class T>
Mdp<T> reset_transform(const Mdp<T>& mdp, const T& gamma, int s0) {
  if (s0 < 0 || s0 >= mdp.num_states()) throw std::invalid_argument("reset state out of range");
  Distribution<int, T> target;
  target.support.push_back({s0, T(1)});
  return reset_transform(mdp, gamma, target);
}

// |g^pi(reset(M)) - (1-gamma) * E_start[v^pi_gamma(.; M)]|, the renewal
// identity residual, computed by two independent solvers.
template <class T>
T verify_renewal_identity(const Mdp<T>& mdp, const T& gamma, const Distribution<int, T>& start,
                          const Policy<T>& pi) {
  const Mdp<T> reset = reset_transform(mdp, gamma, start);
  const T gain = policy_average_gain(reset, pi);
  const std::vector<T> v = policy_evaluation_discounted(mdp, pi, gamma);
  T start_value = 0;
  for (const auto& [s, w] : start.support) start_value += w * v[s];
  return abs_val(gain - (T(1) - gamma) * start_value);
}

template <class T>
T verify_renewal_identity(const Mdp<T>& mdp, const T& gamma, int s0, const Policy<T>& pi) {
  Distribution<int, T> start;
  start.support.push_back({s0, T(1)});
  return verify_renewal_identity(mdp, gamma, start, pi);
}

}  // namespace mdplook
