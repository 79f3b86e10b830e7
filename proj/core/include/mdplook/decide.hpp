#pragma once

#include "mdplook/augment.hpp"
#include "mdplook/onestep.hpp"
#include "mdplook/planners.hpp"

namespace mdplook {

struct Decision {
  bool yes = false;
  double value = 0;  // optimal value (respectively gain) used for the test
  double theta = 0;
  double margin = 0;  // value - theta
};

inline Decision make_decision(double value, double theta) {
  Decision d;
  d.value = value;
  d.theta = theta;
  d.margin = value - theta;
  d.yes = value >= theta;
  return d;
}

// Does some policy with ell-step look-ahead achieve discounted value >= theta
// at s0? Polynomial route for ell <= 1, explicit augmentation beyond.
inline Decision decide_dvdp(const MdpF& mdp, int ell, int s0, double gamma, double theta,
                            double eps = 1e-9, long long budget = kDefaultAugmentBudget) {
  check_lookahead_depth(ell);
  if (s0 < 0 || s0 >= mdp.num_states()) throw std::invalid_argument("invalid start state");
  double value = 0;
  if (ell == 0) {
    value = value_iteration_discounted(mdp, gamma, eps).v[s0];
  } else if (ell == 1) {
    value = solve_onestep_discounted(mdp, gamma, eps).v[s0];
  } else {
    const auto aug = build_augmented_mdp(mdp, {s0}, ell, budget);
    const auto solve = value_iteration_discounted(aug.mdp, gamma, eps);
    value = lookahead_start_value(mdp, s0, ell, aug, solve.v, budget);
  }
  return make_decision(value, theta);
}

// Does some policy with ell-step look-ahead achieve average gain >= theta?
// Requires the (augmented) instance to be unichain.
inline Decision decide_ardp(const MdpF& mdp, int ell, double theta, double span_tol = 1e-9,
                            long long budget = kDefaultAugmentBudget) {
  check_lookahead_depth(ell);
  double value = 0;
  if (ell == 0) {
    value = average_reward_solve(mdp, span_tol).gb.gain;
  } else if (ell == 1) {
    value = solve_onestep_average(mdp, span_tol).gb.gain;
  } else {
    std::vector<int> roots(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) roots[s] = s;
    const auto aug = build_augmented_mdp(mdp, roots, ell, budget);
    value = average_reward_solve(aug.mdp, span_tol).gb.gain;
  }
  return make_decision(value, theta);
}

}  // namespace mdplook
