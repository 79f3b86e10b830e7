#include "mdplook/unichain.hpp"

#include <cmath>

#include "mdplook/graph_algo.hpp"

namespace mdplook {

UnichainReport check_unichain_exhaustive(const std::vector<std::vector<std::vector<bool>>>& support,
                                         long long budget) {
  UnichainReport rep;
  const int A = static_cast<int>(support.size());
  const int S = A > 0 ? static_cast<int>(support[0].size()) : 0;
  if (S == 0 || A == 0) return rep;

  double combos = std::pow(static_cast<double>(A), static_cast<double>(S));
  if (combos > static_cast<double>(budget)) {
    rep.budget_exceeded = true;
    return rep;
  }

  std::vector<int> policy(S, 0);
  std::vector<std::vector<int>> adj(S);
  while (true) {
    for (int s = 0; s < S; ++s) {
      adj[s].clear();
      for (int t = 0; t < S; ++t)
        if (support[policy[s]][s][t]) adj[s].push_back(t);
    }
    auto scc = strongly_connected_components(adj);
    if (closed_components(adj, scc).size() != 1) {
      rep.unichain = false;
      rep.witness_policy = policy;
      return rep;
    }
    // odometer over policies
    int pos = 0;
    while (pos < S && ++policy[pos] == A) policy[pos++] = 0;
    if (pos == S) break;
  }
  rep.unichain = true;
  return rep;
}

}  // namespace mdplook
