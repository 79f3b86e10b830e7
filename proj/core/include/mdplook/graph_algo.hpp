#pragma once

#include <algorithm>
#include <vector>

namespace mdplook {

struct SccResult {
  int count = 0;
  std::vector<int> component;            // node -> component id, reverse topological: edges go from higher to lower ids
  std::vector<std::vector<int>> members; // component id -> nodes
};

// Iterative Tarjan over an adjacency list. Component ids come out in reverse
// topological order of the condensation (every edge leaves a component with a
// larger id or stays inside).
inline SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult res;
  res.component.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int next_index = 0;

  struct Frame { int v; std::size_t edge; };
  std::vector<Frame> call;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < adj[v].size()) {
        int w = adj[v][edge++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          res.members.emplace_back();
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            res.component[w] = res.count;
            res.members.back().push_back(w);
          } while (w != v);
          ++res.count;
        }
        int parent_of = v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[parent_of]);
      }
    }
  }
  for (auto& m : res.members) std::sort(m.begin(), m.end());
  return res;
}

// Components with no edge leaving them: the recurrent classes of a chain
// whose positive-probability structure is the given adjacency.
inline std::vector<int> closed_components(const std::vector<std::vector<int>>& adj,
                                          const SccResult& scc) {
  std::vector<bool> open(scc.count, false);
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    for (int w : adj[v])
      if (scc.component[v] != scc.component[w]) open[scc.component[v]] = true;
  std::vector<int> closed;
  for (int c = 0; c < scc.count; ++c)
    if (!open[c]) closed.push_back(c);
  return closed;
}

}  // namespace mdplook
