#pragma once

// Seeded random instance generators shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "mdplook/mdp.hpp"
#include "mdplook/rng.hpp"

namespace mdplook::testgen {

inline std::vector<std::string> index_names(const char* prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Full-support kernel (every entry >= 0.05/S after normalization), so every
// stationary policy is unichain and aperiodic.
inline MdpF random_mdp(Rng& rng, int S, int A, double reward_lo = 0.0, double reward_hi = 1.0) {
  MdpF mdp;
  mdp.states = index_names("s", S);
  mdp.actions = index_names("a", A);
  mdp.kernel.assign(A, std::vector<std::vector<double>>(S, std::vector<double>(S)));
  for (int a = 0; a < A; ++a)
    for (int s = 0; s < S; ++s) {
      double total = 0;
      for (int t = 0; t < S; ++t) {
        mdp.kernel[a][s][t] = 0.05 + rng.uniform01();
        total += mdp.kernel[a][s][t];
      }
      for (int t = 0; t < S; ++t) mdp.kernel[a][s][t] /= total;
    }
  mdp.rewards.assign(S, std::vector<double>(A));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) mdp.rewards[s][a] = rng.uniform(reward_lo, reward_hi);
  mdp.recompute_r_max();
  return mdp;
}

// Deterministic kernel: look-ahead reveals nothing new.
inline MdpF random_deterministic_mdp(Rng& rng, int S, int A) {
  MdpF mdp;
  mdp.states = index_names("s", S);
  mdp.actions = index_names("a", A);
  mdp.kernel.assign(A, std::vector<std::vector<double>>(S, std::vector<double>(S, 0.0)));
  for (int a = 0; a < A; ++a)
    for (int s = 0; s < S; ++s) mdp.kernel[a][s][rng.below(S)] = 1.0;
  mdp.rewards.assign(S, std::vector<double>(A));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) mdp.rewards[s][a] = rng.uniform01();
  mdp.recompute_r_max();
  return mdp;
}

// Exact-mode instance with small integer weights normalized per row; full
// support keeps it unichain.
inline MdpQ random_rational_mdp(Rng& rng, int S, int A) {
  MdpQ mdp;
  mdp.states = index_names("s", S);
  mdp.actions = index_names("a", A);
  mdp.kernel.assign(A, std::vector<std::vector<Rational>>(S, std::vector<Rational>(S)));
  for (int a = 0; a < A; ++a)
    for (int s = 0; s < S; ++s) {
      std::vector<long> w(S);
      long total = 0;
      for (int t = 0; t < S; ++t) {
        w[t] = 1 + rng.below(9);
        total += w[t];
      }
      for (int t = 0; t < S; ++t) mdp.kernel[a][s][t] = Rational(w[t]) / Rational(total);
    }
  mdp.rewards.assign(S, std::vector<Rational>(A));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) mdp.rewards[s][a] = Rational(rng.below(100)) / Rational(16);
  mdp.recompute_r_max();
  return mdp;
}

template <class T>
Policy<T> random_policy(Rng& rng, const Mdp<T>& mdp) {
  Policy<T> pi;
  pi.deterministic = true;
  pi.choice.resize(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) pi.choice[s] = rng.below(mdp.num_actions());
  return pi;
}

template <class T>
Policy<T> random_stochastic_policy(Rng& rng, const Mdp<T>& mdp) {
  Policy<T> pi;
  pi.deterministic = false;
  pi.weights.assign(mdp.num_states(), std::vector<T>(mdp.num_actions()));
  for (int s = 0; s < mdp.num_states(); ++s) {
    long total = 0;
    std::vector<long> w(mdp.num_actions());
    for (int a = 0; a < mdp.num_actions(); ++a) {
      w[a] = 1 + rng.below(9);
      total += w[a];
    }
    for (int a = 0; a < mdp.num_actions(); ++a) pi.weights[s][a] = T(w[a]) / T(total);
  }
  return pi;
}

}  // namespace mdplook::testgen
