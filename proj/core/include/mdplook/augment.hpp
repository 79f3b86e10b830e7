#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mdplook/mdp.hpp"

namespace mdplook {

inline constexpr int kMaxLookahead = 4;
inline constexpr long long kDefaultAugmentBudget = 1000000;

inline void check_lookahead_depth(int ell) {
  if (ell < 0 || ell > kMaxLookahead)
    throw std::invalid_argument("look-ahead depth must lie in [0, " +
                                std::to_string(kMaxLookahead) + "]");
}

// Look-ahead tuple. blocks[k][j] is the state reached from blocks[0][0] under
// the j-th action sequence of length k, sequences ordered lexicographically
// (index = sum a_i * A^{k-1-i}, so the slice for sequences starting with
// action a is [a*A^{k-1}, (a+1)*A^{k-1})).
struct AugmentedState {
  std::vector<std::vector<int>> blocks;

  int root() const { return blocks[0][0]; }
  int depth() const { return static_cast<int>(blocks.size()) - 1; }

  bool operator==(const AugmentedState& o) const { return blocks == o.blocks; }
};

// Injective byte encoding: dense indices block by block, big-endian 16-bit,
// so byte order equals index-tuple order.
inline std::string encode_augmented(const AugmentedState& xi) {
  std::string key;
  for (const auto& block : xi.blocks)
    for (int v : block) {
      key.push_back(static_cast<char>((v >> 8) & 0xff));
      key.push_back(static_cast<char>(v & 0xff));
    }
  return key;
}

inline AugmentedState decode_augmented(const std::string& key, int num_actions) {
  AugmentedState xi;
  std::size_t pos = 0;
  std::size_t block_len = 1;
  while (pos < key.size()) {
    std::vector<int> block;
    block.reserve(block_len);
    for (std::size_t j = 0; j < block_len; ++j) {
      if (pos + 1 >= key.size()) throw std::invalid_argument("truncated augmented-state key");
      int hi = static_cast<unsigned char>(key[pos]);
      int lo = static_cast<unsigned char>(key[pos + 1]);
      block.push_back((hi << 8) | lo);
      pos += 2;
    }
    xi.blocks.push_back(std::move(block));
    block_len *= num_actions;
  }
  return xi;
}

template <class T>
std::string augmented_name(const Mdp<T>& base, const AugmentedState& xi) {
  std::string name = "xi(";
  for (std::size_t k = 0; k < xi.blocks.size(); ++k) {
    if (k) name += '|';
    for (std::size_t j = 0; j < xi.blocks[k].size(); ++j) {
      if (j) name += ',';
      name += base.states[xi.blocks[k][j]];
    }
  }
  name += ')';
  return name;
}

// Every entry must be reachable from its parent entry under the sequence's
// last action with positive kernel mass.
template <class T>
bool is_consistent(const Mdp<T>& mdp, const AugmentedState& xi) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (xi.blocks.empty() || xi.blocks[0].size() != 1) return false;
  std::size_t expect = 1;
  for (std::size_t k = 0; k < xi.blocks.size(); ++k) {
    if (xi.blocks[k].size() != expect) return false;
    expect *= A;
    for (std::size_t j = 0; j < xi.blocks[k].size(); ++j) {
      const int v = xi.blocks[k][j];
      if (v < 0 || v >= S) return false;
      if (k == 0) continue;
      const int parent = xi.blocks[k - 1][j / A];
      const int last_action = static_cast<int>(j % A);
      if (numeric_traits<T>::is_zero(mdp.kernel[last_action][parent][v])) return false;
    }
  }
  return true;
}

template <class T>
using AugmentedDistribution = Distribution<AugmentedState, T>;

namespace detail {

// Positions of distinct states in index order.
inline std::vector<int> distinct_states(const std::vector<int>& entries) {
  std::vector<int> d(entries);
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

// Enumerates joint successor draws: one draw per (distinct parent state,
// action) pair, every sequence through the same pair sharing that draw.
// fn(assignment, weight) where assignment[d*A + a] is the draw for
// (distinct[d], action a). Zero-mass branches are pruned.
template <class T, class Fn>
void for_each_joint_draw(const Mdp<T>& mdp, const std::vector<int>& distinct, Fn&& fn) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int slots = static_cast<int>(distinct.size()) * A;
  std::vector<int> assign(slots, 0);
  std::function<void(int, T)> rec = [&](int slot, T weight) {
    if (slot == slots) {
      fn(assign, weight);
      return;
    }
    const int src = distinct[slot / A];
    const int act = slot % A;
    for (int t = 0; t < S; ++t) {
      const T& p = mdp.kernel[act][src][t];
      if (numeric_traits<T>::is_zero(p)) continue;
      assign[slot] = t;
      rec(slot + 1, weight * p);
    }
  };
  rec(0, T(1));
}

inline int lookup_draw(const std::vector<int>& distinct, const std::vector<int>& assign,
                       int state, int action, int A) {
  const auto it = std::lower_bound(distinct.begin(), distinct.end(), state);
  return assign[static_cast<int>(it - distinct.begin()) * A + action];
}

}  // namespace detail

// Joint law of the look-ahead tuple rooted at s: level by level, one
// successor draw per (reached state, action) pair, shared by all action
// sequences passing through that pair.
template <class T>
AugmentedDistribution<T> initial_lookahead_distribution(const Mdp<T>& mdp, int s, int ell,
                                                        long long budget = kDefaultAugmentBudget) {
  check_lookahead_depth(ell);
  if (s < 0 || s >= mdp.num_states()) throw std::invalid_argument("invalid root state");
  const int A = mdp.num_actions();

  AugmentedDistribution<T> dist;
  dist.support.push_back({AugmentedState{{{s}}}, T(1)});
  for (int k = 1; k <= ell; ++k) {
    AugmentedDistribution<T> next;
    for (const auto& [xi, w] : dist.support) {
      const auto& parents = xi.blocks[k - 1];
      const auto distinct = detail::distinct_states(parents);
      detail::for_each_joint_draw(mdp, distinct, [&](const std::vector<int>& assign, T jw) {
        AugmentedState grown = xi;
        std::vector<int> block(parents.size() * A);
        for (std::size_t j = 0; j < block.size(); ++j)
          block[j] = detail::lookup_draw(distinct, assign, parents[j / A],
                                         static_cast<int>(j % A), A);
        grown.blocks.push_back(std::move(block));
        next.support.push_back({std::move(grown), w * jw});
        if (static_cast<long long>(next.support.size()) > budget)
          throw BudgetError("look-ahead support exceeds budget");
      });
    }
    dist = std::move(next);
  }
  return dist;
}

// One augmented transition: inherited blocks are the slices of xi along the
// played action; only the deepest block is stochastic, factorizing over
// (distinct depth-(ell-1) state, action) pairs with shared draws.
template <class T>
AugmentedDistribution<T> augmented_kernel(const Mdp<T>& mdp, const AugmentedState& xi, int a,
                                          long long budget = kDefaultAugmentBudget) {
  const int A = mdp.num_actions();
  const int ell = xi.depth();
  check_lookahead_depth(ell);
  if (a < 0 || a >= A) throw std::invalid_argument("invalid action index");
  if (!is_consistent(mdp, xi)) throw std::invalid_argument("inconsistent augmented state");

  AugmentedDistribution<T> dist;
  if (ell == 0) {
    const int s = xi.root();
    for (int t = 0; t < mdp.num_states(); ++t)
      if (!numeric_traits<T>::is_zero(mdp.kernel[a][s][t]))
        dist.support.push_back({AugmentedState{{{t}}}, mdp.kernel[a][s][t]});
    return dist;
  }

  AugmentedState shifted;
  std::size_t width = 1;
  for (int k = 1; k <= ell; ++k) {
    const auto& block = xi.blocks[k];
    shifted.blocks.emplace_back(block.begin() + static_cast<std::ptrdiff_t>(a * width),
                                block.begin() + static_cast<std::ptrdiff_t>((a + 1) * width));
    width *= A;
  }

  const auto& parents = shifted.blocks[ell - 1];
  const auto distinct = detail::distinct_states(parents);
  detail::for_each_joint_draw(mdp, distinct, [&](const std::vector<int>& assign, T jw) {
    AugmentedState nxt = shifted;
    std::vector<int> block(parents.size() * A);
    for (std::size_t j = 0; j < block.size(); ++j)
      block[j] =
          detail::lookup_draw(distinct, assign, parents[j / A], static_cast<int>(j % A), A);
    nxt.blocks.push_back(std::move(block));
    dist.support.push_back({std::move(nxt), jw});
    if (static_cast<long long>(dist.support.size()) > budget)
      throw BudgetError("augmented kernel support exceeds budget");
  });
  return dist;
}

// Breadth-first closure of the initial look-ahead supports under the
// augmented kernel, keyed canonically so the result is schedule-independent.
template <class T>
std::map<std::string, AugmentedState> reachable_augmented_states(
    const Mdp<T>& mdp, const std::vector<int>& roots, int ell,
    long long budget = kDefaultAugmentBudget) {
  check_lookahead_depth(ell);
  std::map<std::string, AugmentedState> seen;
  std::vector<AugmentedState> frontier;
  for (int s : roots)
    for (auto& [xi, w] : initial_lookahead_distribution(mdp, s, ell, budget).support) {
      std::string key = encode_augmented(xi);
      if (seen.emplace(std::move(key), xi).second) frontier.push_back(xi);
    }
  while (!frontier.empty()) {
    if (static_cast<long long>(seen.size()) > budget)
      throw BudgetError("reachable augmented set exceeds budget");
    std::vector<AugmentedState> next_frontier;
    for (const auto& xi : frontier)
      for (int a = 0; a < mdp.num_actions(); ++a)
        for (auto& [nxt, w] : augmented_kernel(mdp, xi, a, budget).support) {
          std::string key = encode_augmented(nxt);
          if (seen.emplace(std::move(key), nxt).second) {
            next_frontier.push_back(nxt);
            if (static_cast<long long>(seen.size()) > budget)
              throw BudgetError("reachable augmented set exceeds budget");
          }
        }
    frontier = std::move(next_frontier);
  }
  return seen;
}

template <class T>
struct AugmentedBuild {
  Mdp<T> mdp;                          // states named by the printable key form
  std::vector<AugmentedState> decoded; // parallel to mdp.states
  std::map<std::string, int> index_of_key;

  int index_of(const AugmentedState& xi) const {
    auto it = index_of_key.find(encode_augmented(xi));
    return it == index_of_key.end() ? -1 : it->second;
  }
};

// Explicit augmented MDP over the reachable set: action set unchanged,
// reward of (xi, a) equal to the base reward at the tuple's root.
template <class T>
AugmentedBuild<T> build_augmented_mdp(const Mdp<T>& mdp, const std::vector<int>& roots, int ell,
                                      long long budget = kDefaultAugmentBudget) {
  auto reach = reachable_augmented_states(mdp, roots, ell, budget);
  AugmentedBuild<T> out;
  const int A = mdp.num_actions();
  const int n = static_cast<int>(reach.size());

  out.decoded.reserve(reach.size());
  for (auto& [key, xi] : reach) {
    out.index_of_key.emplace(key, static_cast<int>(out.decoded.size()));
    out.decoded.push_back(xi);
  }

  out.mdp.actions = mdp.actions;
  out.mdp.states.reserve(reach.size());
  for (const auto& xi : out.decoded) out.mdp.states.push_back(augmented_name(mdp, xi));

  out.mdp.kernel.assign(A, std::vector<std::vector<T>>(n, std::vector<T>(n, T(0))));
  out.mdp.rewards.assign(n, std::vector<T>(A, T(0)));
  for (int i = 0; i < n; ++i) {
    const auto& xi = out.decoded[i];
    for (int a = 0; a < A; ++a) {
      out.mdp.rewards[i][a] = mdp.rewards[xi.root()][a];
      for (auto& [nxt, p] : augmented_kernel(mdp, xi, a, budget).support) {
        auto it = out.index_of_key.find(encode_augmented(nxt));
        if (it == out.index_of_key.end())
          throw std::logic_error("augmented kernel left the reachable closure");
        out.mdp.kernel[a][i][it->second] += p;
      }
    }
  }
  out.mdp.gamma = mdp.gamma;
  out.mdp.recompute_r_max();
  return out;
}

// Simulator step: re-roots the tuple along the played action and draws one
// fresh deepest block (one draw per (state, action) pair, index order, so a
// fixed seed yields a fixed trajectory). Returns the successor tuple and the
// reward of the leaving state.
template <class T>
std::pair<AugmentedState, T> lookahead_simulator_step(const Mdp<T>& mdp, const AugmentedState& xi,
                                                      int a, Rng& rng) {
  const int A = mdp.num_actions();
  const int ell = xi.depth();
  check_lookahead_depth(ell);
  if (a < 0 || a >= A) throw std::invalid_argument("invalid action index");
  if (!is_consistent(mdp, xi)) throw std::invalid_argument("inconsistent augmented state");
  const T reward = mdp.rewards[xi.root()][a];

  if (ell == 0) {
    const int t = sample_transition(mdp, xi.root(), a, rng);
    return {AugmentedState{{{t}}}, reward};
  }

  AugmentedState nxt;
  std::size_t width = 1;
  for (int k = 1; k <= ell; ++k) {
    const auto& block = xi.blocks[k];
    nxt.blocks.emplace_back(block.begin() + static_cast<std::ptrdiff_t>(a * width),
                            block.begin() + static_cast<std::ptrdiff_t>((a + 1) * width));
    width *= A;
  }
  const auto& parents = nxt.blocks[ell - 1];
  const auto distinct = detail::distinct_states(parents);
  std::vector<int> assign(distinct.size() * A);
  for (std::size_t d = 0; d < distinct.size(); ++d)
    for (int act = 0; act < A; ++act)
      assign[d * A + act] = sample_transition(mdp, distinct[d], act, rng);
  std::vector<int> block(parents.size() * A);
  for (std::size_t j = 0; j < block.size(); ++j)
    block[j] = detail::lookup_draw(distinct, assign, parents[j / A], static_cast<int>(j % A), A);
  nxt.blocks.push_back(std::move(block));
  return {nxt, reward};
}

template <class T>
std::pair<AugmentedState, T> lookahead_simulator_step(const Mdp<T>& mdp, const AugmentedState& xi,
                                                      int a, std::uint64_t seed) {
  Rng rng(seed);
  return lookahead_simulator_step(mdp, xi, a, rng);
}

// Expectation of a per-augmented-state value under the initial look-ahead law.
template <class T>
T lookahead_start_value(const Mdp<T>& mdp, int s, int ell, const AugmentedBuild<T>& aug,
                        const std::vector<T>& v, long long budget = kDefaultAugmentBudget) {
  T total = 0;
  for (const auto& [xi, w] : initial_lookahead_distribution(mdp, s, ell, budget).support) {
    const int idx = aug.index_of(xi);
    if (idx < 0) throw std::logic_error("initial look-ahead state missing from the build");
    total += w * v[idx];
  }
  return total;
}

}  // namespace mdplook
