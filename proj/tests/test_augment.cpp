#include "doctest.h"

#include <map>

#include "mdplook/augment.hpp"
#include "mdplook/planners.hpp"
#include "support/gen.hpp"

using namespace mdplook;

namespace {

// Independent reference for one augmented transition, written as a direct
// nested enumeration over per-(state, action) draws with explicit sharing.
template <class T>
std::map<std::string, T> reference_kernel(const Mdp<T>& mdp, const AugmentedState& xi, int a) {
  const int A = mdp.num_actions();
  const int S = mdp.num_states();
  const int ell = xi.depth();

  // slice the inherited blocks along action a
  AugmentedState base;
  std::size_t width = 1;
  for (int k = 1; k <= ell; ++k) {
    std::vector<int> slice;
    for (std::size_t j = 0; j < width; ++j) slice.push_back(xi.blocks[k][a * width + j]);
    base.blocks.push_back(std::move(slice));
    width *= A;
  }

  // fresh deepest block: one shared draw per (parent state, action) pair
  const std::vector<int>& parents = base.blocks[ell - 1];
  std::vector<std::pair<int, int>> pairs;
  for (int p : parents)
    for (int act = 0; act < A; ++act)
      if (std::find(pairs.begin(), pairs.end(), std::make_pair(p, act)) == pairs.end())
        pairs.push_back({p, act});

  std::map<std::string, T> law;
  std::vector<int> pick(pairs.size(), 0);
  std::function<void(std::size_t, T)> rec = [&](std::size_t i, T w) {
    if (i == pairs.size()) {
      AugmentedState nxt = base;
      std::vector<int> deepest;
      for (std::size_t j = 0; j < parents.size() * static_cast<std::size_t>(A); ++j) {
        const std::pair<int, int> key = {parents[j / A], static_cast<int>(j % A)};
        const auto it = std::find(pairs.begin(), pairs.end(), key);
        deepest.push_back(pick[static_cast<std::size_t>(it - pairs.begin())]);
      }
      nxt.blocks.push_back(deepest);
      law[encode_augmented(nxt)] += w;
      return;
    }
    for (int t = 0; t < S; ++t) {
      const T& p = mdp.kernel[pairs[i].second][pairs[i].first][t];
      if (numeric_traits<T>::is_zero(p)) continue;
      pick[i] = t;
      rec(i + 1, w * p);
    }
  };
  rec(0, T(1));
  return law;
}

}  // namespace

TEST_CASE("encode and decode are inverse at every depth") {
  for (int A = 2; A <= 3; ++A) {
    AugmentedState xi;
    xi.blocks = {{300}};
    std::size_t width = 1;
    for (int k = 1; k <= 3; ++k) {
      width *= static_cast<std::size_t>(A);
      std::vector<int> block;
      for (std::size_t j = 0; j < width; ++j) block.push_back(static_cast<int>(j * 257 % 999));
      xi.blocks.push_back(block);
    }
    CHECK(decode_augmented(encode_augmented(xi), A) == xi);
  }
}

TEST_CASE("consistency screens block shapes and unreachable entries") {
  MdpF mdp;
  mdp.states = {"a", "b"};
  mdp.actions = {"u", "w"};
  mdp.kernel = {{{1, 0}, {0, 1}}, {{0, 1}, {1, 0}}};
  mdp.rewards = {{0, 0}, {0, 0}};
  mdp.recompute_r_max();

  AugmentedState ok{{{0}, {0, 1}}};  // u keeps a at a, w sends a to b
  CHECK(is_consistent(mdp, ok));
  AugmentedState wrong_shape{{{0}, {0}}};
  CHECK(!is_consistent(mdp, wrong_shape));
  AugmentedState unreachable{{{0}, {1, 1}}};  // u cannot send a to b
  CHECK(!is_consistent(mdp, unreachable));
  AugmentedState out_of_range{{{0}, {0, 5}}};
  CHECK(!is_consistent(mdp, out_of_range));
}

TEST_CASE("depth-1 look-ahead distribution is the product over actions") {
  Rng rng(31);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  const int s = 1;
  const auto dist = initial_lookahead_distribution(mdp, s, 1);
  Rational total = 0;
  for (const auto& [xi, w] : dist.support) {
    REQUIRE(xi.depth() == 1);
    CHECK(xi.root() == s);
    // at depth 1 every action is a distinct (state, action) pair, so the
    // draws are independent and the weight is the product of kernel entries
    CHECK(w == mdp.kernel[0][s][xi.blocks[1][0]] * mdp.kernel[1][s][xi.blocks[1][1]]);
    total += w;
  }
  CHECK(total == 1);

  // per-action marginals recover the kernel rows exactly
  for (int a = 0; a < 2; ++a)
    for (int t = 0; t < 3; ++t) {
      Rational marginal = 0;
      for (const auto& [xi, w] : dist.support)
        if (xi.blocks[1][a] == t) marginal += w;
      CHECK(marginal == mdp.kernel[a][s][t]);
    }
}

TEST_CASE("deeper look-ahead distributions share draws across duplicate parents") {
  // Deterministic MDP: the whole tuple is forced, support is a single point.
  Rng rng(37);
  const MdpF mdp = testgen::random_deterministic_mdp(rng, 3, 2);
  for (int ell = 1; ell <= 3; ++ell) {
    const auto dist = initial_lookahead_distribution(mdp, 0, ell);
    REQUIRE(dist.support.size() == 1);
    CHECK(dist.support[0].second == 1.0);
    CHECK(is_consistent(mdp, dist.support[0].first));
  }
}

TEST_CASE("augmented kernel matches an independent enumeration, exact arithmetic") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const MdpQ mdp = testgen::random_rational_mdp(rng, 2 + trial % 2, 2);
    for (int ell = 1; ell <= 2; ++ell) {
      const auto dist = initial_lookahead_distribution(mdp, 0, ell);
      for (const auto& [xi, w0] : dist.support)
        for (int a = 0; a < 2; ++a) {
          const auto got = augmented_kernel(mdp, xi, a);
          const auto want = reference_kernel(mdp, xi, a);
          Rational total = 0;
          std::map<std::string, Rational> got_map;
          for (const auto& [nxt, p] : got.support) {
            CHECK(is_consistent(mdp, nxt));
            got_map[encode_augmented(nxt)] += p;
            total += p;
          }
          CHECK(total == 1);
          CHECK(got_map.size() == want.size());
          for (const auto& [key, p] : want) CHECK(got_map.at(key) == p);
        }
    }
  }
}

TEST_CASE("augmented build is closed, validated, and reward-consistent") {
  Rng rng(43);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  const auto aug = build_augmented_mdp(mdp, {0, 1, 2}, 2);
  CHECK(validate_mdp(aug.mdp).pass);
  for (std::size_t i = 0; i < aug.decoded.size(); ++i) {
    CHECK(aug.index_of(aug.decoded[i]) == static_cast<int>(i));
    CHECK(aug.mdp.states[i] == augmented_name(mdp, aug.decoded[i]));
    for (int a = 0; a < 2; ++a)
      CHECK(aug.mdp.rewards[i][a] == mdp.rewards[aug.decoded[i].root()][a]);
  }
}

TEST_CASE("depth-0 augmentation is the base process on reachable states") {
  Rng rng(47);
  const MdpF mdp = testgen::random_mdp(rng, 4, 2);
  const auto aug = build_augmented_mdp(mdp, {0, 1, 2, 3}, 0);
  REQUIRE(aug.mdp.num_states() == 4);
  const auto vi_base = value_iteration_discounted(mdp, 0.9, 1e-10);
  const auto vi_aug = value_iteration_discounted(aug.mdp, 0.9, 1e-10);
  for (int s = 0; s < 4; ++s) {
    const int i = aug.index_of(AugmentedState{{{s}}});
    REQUIRE(i >= 0);
    CHECK(vi_aug.v[i] == doctest::Approx(vi_base.v[s]).epsilon(1e-9));
    CHECK(lookahead_start_value(mdp, s, 0, aug, vi_aug.v) ==
          doctest::Approx(vi_base.v[s]).epsilon(1e-9));
  }
}

TEST_CASE("simulator empirical law matches the kernel row") {
  Rng rng(53);
  const MdpF mdp = testgen::random_mdp(rng, 3, 2);
  const auto dist = initial_lookahead_distribution(mdp, 0, 1);
  const AugmentedState xi = dist.support[0].first;
  const int a = 1;
  const auto want = augmented_kernel(mdp, xi, a);

  std::map<std::string, int> counts;
  const int trials = 20000;
  Rng sim(99);
  for (int i = 0; i < trials; ++i) {
    const auto [nxt, reward] = lookahead_simulator_step(mdp, xi, a, sim);
    CHECK(reward == mdp.rewards[xi.root()][a]);
    ++counts[encode_augmented(nxt)];
  }
  double tv = 0;
  for (const auto& [nxt, p] : want.support)
    tv += std::fabs(counts[encode_augmented(nxt)] / double(trials) - p);
  CHECK(tv < 0.05);
}

TEST_CASE("seeded simulator steps replay exactly") {
  Rng rng(59);
  const MdpF mdp = testgen::random_mdp(rng, 3, 2);
  const auto dist = initial_lookahead_distribution(mdp, 1, 2);
  const AugmentedState xi = dist.support[3].first;
  const auto [n1, r1] = lookahead_simulator_step(mdp, xi, 0, std::uint64_t(123));
  const auto [n2, r2] = lookahead_simulator_step(mdp, xi, 0, std::uint64_t(123));
  CHECK(n1 == n2);
  CHECK(r1 == r2);
}

TEST_CASE("budgets refuse oversized expansions") {
  Rng rng(61);
  const MdpF mdp = testgen::random_mdp(rng, 4, 3);
  CHECK_THROWS_AS(initial_lookahead_distribution(mdp, 0, 3, 50), BudgetError);
  CHECK_THROWS_AS(build_augmented_mdp(mdp, {0}, 2, 100), BudgetError);
  CHECK_THROWS_AS(initial_lookahead_distribution(mdp, 0, 7), std::invalid_argument);
}
