#pragma once

#include <optional>
#include <vector>

#include "mdplook/mdp.hpp"

namespace mdplook {

struct UnichainReport {
  bool unichain = false;
  bool budget_exceeded = false;
  // A deterministic policy inducing at least two recurrent classes, if found.
  std::optional<std::vector<int>> witness_policy;
};

// Enumerates all |A|^|S| deterministic stationary policies and counts the
// recurrent classes of each induced chain. Exceeding the enumeration budget
// refuses the check instead of approximating it.
UnichainReport check_unichain_exhaustive(const std::vector<std::vector<std::vector<bool>>>& support,
                                         long long budget = 1000000);

template <class T>
std::vector<std::vector<std::vector<bool>>> kernel_support(const Mdp<T>& mdp) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<std::vector<std::vector<bool>>> sup(
      A, std::vector<std::vector<bool>>(S, std::vector<bool>(S, false)));
  for (int a = 0; a < A; ++a)
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t) sup[a][s][t] = !numeric_traits<T>::is_zero(mdp.kernel[a][s][t]);
  return sup;
}

template <class T>
UnichainReport check_unichain_exhaustive(const Mdp<T>& mdp, long long budget = 1000000) {
  return check_unichain_exhaustive(kernel_support(mdp), budget);
}

}  // namespace mdplook
