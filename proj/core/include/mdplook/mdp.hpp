#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mdplook/numeric.hpp"
#include "mdplook/rng.hpp"

namespace mdplook {

// Generic discrete distribution over items of type Item with scalar weights T.
template <class Item, class T>
struct Distribution {
  std::vector<std::pair<Item, T>> support;

  T total() const {
    T s = 0;
    for (const auto& [item, p] : support) s += p;
    return s;
  }
};

// Tabular MDP over dense state/action indices; names give the file identity.
// kernel[a][s][s'] is P_a(s'|s); rewards[s][a] in [0, r_max].
template <class T>
struct Mdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<std::vector<T>>> kernel;
  std::vector<std::vector<T>> rewards;
  std::optional<T> gamma;
  std::optional<int> initial_state;
  T r_max = 0;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }

  const T& prob(int a, int from, int to) const { return kernel[a][from][to]; }
  const T& reward(int s, int a) const { return rewards[s][a]; }

  int state_index(const std::string& name) const {
    auto it = std::find(states.begin(), states.end(), name);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
  }

  void recompute_r_max() {
    r_max = 0;
    for (const auto& row : rewards)
      for (const auto& r : row)
        if (r > r_max) r_max = r;
  }

  bool is_deterministic() const {
    for (const auto& mat : kernel)
      for (const auto& row : mat)
        for (const auto& p : row)
          if (!numeric_traits<T>::is_zero(p) && p != T(1)) return false;
    return true;
  }
};

using MdpF = Mdp<double>;
using MdpQ = Mdp<Rational>;

template <class T>
struct Policy {
  bool deterministic = true;
  std::vector<int> choice;               // deterministic: action per state
  std::vector<std::vector<T>> weights;   // randomized: weights[s][a]

  int num_states() const {
    return static_cast<int>(deterministic ? choice.size() : weights.size());
  }

  // Probability of playing a in s.
  T prob(int s, int a) const {
    if (deterministic) return choice[s] == a ? T(1) : T(0);
    return weights[s][a];
  }

  static Policy uniform_random(int num_states, int num_actions) {
    Policy p;
    p.deterministic = false;
    p.weights.assign(num_states, std::vector<T>(num_actions, T(1) / T(num_actions)));
    return p;
  }
};

struct Violation {
  std::string kind;    // row-sum | negative-probability | reward-range | shape | id-collision | gamma-range | initial-state
  std::string where;
  std::string detail;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;

  void add(std::string kind, std::string where, std::string detail) {
    pass = false;
    violations.push_back({std::move(kind), std::move(where), std::move(detail)});
  }
};

// Structural and stochasticity checks. Violations are data, not exceptions.
// Float mode: row sums within 1e-12. Exact mode: row sums exactly 1.
template <class T>
ValidationReport validate_mdp(const Mdp<T>& mdp) {
  ValidationReport rep;
  const int S = mdp.num_states();
  const int A = mdp.num_actions();

  if (S == 0) rep.add("shape", "states", "empty state set");
  if (A == 0) rep.add("shape", "actions", "empty action set");

  std::unordered_set<std::string> seen;
  for (const auto& s : mdp.states)
    if (!seen.insert(s).second) rep.add("id-collision", "states", "duplicate state id '" + s + "'");
  seen.clear();
  for (const auto& a : mdp.actions)
    if (!seen.insert(a).second) rep.add("id-collision", "actions", "duplicate action id '" + a + "'");

  if (static_cast<int>(mdp.kernel.size()) != A) {
    rep.add("shape", "transitions", "expected one matrix per action");
    return rep;
  }
  for (int a = 0; a < A; ++a) {
    if (static_cast<int>(mdp.kernel[a].size()) != S) {
      rep.add("shape", "transitions[" + mdp.actions[a] + "]", "expected one row per state");
      continue;
    }
    for (int s = 0; s < S; ++s) {
      const auto& row = mdp.kernel[a][s];
      if (static_cast<int>(row.size()) != S) {
        rep.add("shape", "transitions[" + mdp.actions[a] + "][" + mdp.states[s] + "]",
                "expected one entry per state");
        continue;
      }
      T sum = 0;
      bool neg = false;
      for (const T& p : row) {
        if (p < T(0)) neg = true;
        sum += p;
      }
      if (neg)
        rep.add("negative-probability", "transitions[" + mdp.actions[a] + "][" + mdp.states[s] + "]",
                "negative entry");
      if (abs_val(sum - T(1)) > numeric_traits<T>::row_sum_tol)
        rep.add("row-sum", "transitions[" + mdp.actions[a] + "][" + mdp.states[s] + "]",
                "row sums to " + std::to_string(to_double(sum)));
    }
  }

  if (static_cast<int>(mdp.rewards.size()) != S) {
    rep.add("shape", "rewards", "expected one row per state");
  } else {
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(mdp.rewards[s].size()) != A) {
        rep.add("shape", "rewards[" + mdp.states[s] + "]", "expected one entry per action");
        continue;
      }
      for (int a = 0; a < A; ++a) {
        const T& r = mdp.rewards[s][a];
        if (r < T(0) || r > mdp.r_max)
          rep.add("reward-range", "rewards[" + mdp.states[s] + "][" + mdp.actions[a] + "]",
                  "outside [0, r_max]");
      }
    }
  }

  if (mdp.gamma && !(*mdp.gamma > T(0) && *mdp.gamma < T(1)))
    rep.add("gamma-range", "gamma", "discount must lie in (0,1)");
  if (mdp.initial_state && (*mdp.initial_state < 0 || *mdp.initial_state >= S))
    rep.add("initial-state", "initial_state", "unknown state");

  return rep;
}

template <class T>
ValidationReport validate_policy(const Mdp<T>& mdp, const Policy<T>& pi) {
  ValidationReport rep;
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (pi.num_states() != S) {
    rep.add("shape", "policy", "expected one entry per state");
    return rep;
  }
  for (int s = 0; s < S; ++s) {
    if (pi.deterministic) {
      if (pi.choice[s] < 0 || pi.choice[s] >= A) rep.add("shape", "policy", "invalid action index");
    } else {
      T sum = 0;
      for (int a = 0; a < A; ++a) {
        if (pi.weights[s][a] < T(0)) rep.add("negative-probability", "policy", "negative weight");
        sum += pi.weights[s][a];
      }
      if (abs_val(sum - T(1)) > numeric_traits<T>::row_sum_tol)
        rep.add("row-sum", "policy", "weights do not sum to 1");
    }
  }
  return rep;
}

// One kernel draw. Exact-mode rows are converted to double weights for the
// inverse-CDF draw; the law itself stays exact elsewhere.
template <class T>
int sample_transition(const Mdp<T>& mdp, int state, int action, Rng& rng) {
  if (state < 0 || state >= mdp.num_states()) throw std::invalid_argument("invalid state index");
  if (action < 0 || action >= mdp.num_actions()) throw std::invalid_argument("invalid action index");
  const auto& row = mdp.kernel[action][state];
  std::vector<double> w(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) w[i] = to_double(row[i]);
  return rng.categorical(w);
}

template <class T>
int sample_transition(const Mdp<T>& mdp, int state, int action, std::uint64_t seed) {
  Rng rng(seed);
  return sample_transition(mdp, state, action, rng);
}

// Exact-to-float conversion; refused when any magnitude exceeds 2^53 because
// the value could not survive the round trip.
inline MdpF mdp_to_float(const MdpQ& q) {
  auto conv = [](const Rational& x) {
    if (!fits_double_exactly(x))
      throw PrecisionError("quantity " + format_fraction(x) + " exceeds 2^53; float export refused");
    return x.get_d();
  };
  MdpF f;
  f.states = q.states;
  f.actions = q.actions;
  f.kernel.resize(q.kernel.size());
  for (std::size_t a = 0; a < q.kernel.size(); ++a) {
    f.kernel[a].resize(q.kernel[a].size());
    for (std::size_t s = 0; s < q.kernel[a].size(); ++s)
      for (const auto& p : q.kernel[a][s]) f.kernel[a][s].push_back(conv(p));
  }
  f.rewards.resize(q.rewards.size());
  for (std::size_t s = 0; s < q.rewards.size(); ++s)
    for (const auto& r : q.rewards[s]) f.rewards[s].push_back(conv(r));
  if (q.gamma) f.gamma = conv(*q.gamma);
  f.initial_state = q.initial_state;
  f.r_max = conv(q.r_max);
  return f;
}

}  // namespace mdplook
