#include "doctest.h"

#include <algorithm>
#include <map>

#include "mdplook/augment.hpp"
#include "mdplook/onestep.hpp"
#include "mdplook/planners.hpp"
#include "support/gen.hpp"

using namespace mdplook;

namespace {

template <class T>
ScoreMatrix<T> random_scores(Rng& rng, int S, int A) {
  ScoreMatrix<T> u(S, std::vector<T>(A));
  for (auto& row : u)
    for (auto& x : row) {
      if constexpr (std::is_same_v<T, double>)
        x = rng.uniform(-1.0, 1.0);
      else
        x = (Rational(rng.below(2001)) - 1000) / Rational(1000);
    }
  return u;
}

// First-match probabilities by direct enumeration of all next-state vectors.
template <class T>
std::vector<T> event_probabilities_reference(const Mdp<T>& mdp, int s, const OrderingList& m) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<T> mu(m.size(), T(0));
  std::vector<int> p(A, 0);
  while (true) {
    T prob = product_lookahead_prob(mdp, s, p);
    if (!numeric_traits<T>::is_zero(prob)) {
      for (std::size_t i = 0; i < m.size(); ++i)
        if (p[m[i].action] == m[i].state) {
          mu[i] += prob;
          break;
        }
    }
    int pos = 0;
    while (pos < A && ++p[pos] == S) p[pos++] = 0;
    if (pos == A) break;
  }
  return mu;
}

}  // namespace

TEST_CASE("first-match probabilities: exact partition and reference agreement") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const MdpQ mdp = testgen::random_rational_mdp(rng, 2 + rng.below(3), 2 + rng.below(2));
    const int s = rng.below(mdp.num_states());
    const auto u = random_scores<Rational>(rng, mdp.num_states(), mdp.num_actions());
    const auto m = make_score_ordering(u, mdp.num_states(), mdp.num_actions());
    const auto mu = event_probabilities(mdp, s, m);
    const auto ref = event_probabilities_reference(mdp, s, m);
    Rational total = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(mu[i] == ref[i]);
      CHECK(mu[i] >= 0);
      total += mu[i];
    }
    CHECK(total == 1);
  }
}

TEST_CASE("first-match probabilities hold for arbitrary orderings too") {
  Rng rng(73);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  OrderingList m;
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) m.push_back({s, a});
  for (int shuffle = 0; shuffle < 10; ++shuffle) {
    for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng.below(int(i))]);
    const auto mu = event_probabilities(mdp, 0, m);
    const auto ref = event_probabilities_reference(mdp, 0, m);
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(mu[i] == ref[i]);
  }
}

TEST_CASE("malformed orderings are rejected") {
  Rng rng(79);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 2, 2);
  OrderingList missing = {{0, 0}, {0, 1}, {1, 0}};
  CHECK_THROWS_AS(event_probabilities(mdp, 0, missing), std::invalid_argument);
  OrderingList repeated = {{0, 0}, {0, 1}, {1, 0}, {0, 0}};
  CHECK_THROWS_AS(event_probabilities(mdp, 0, repeated), std::invalid_argument);
}

TEST_CASE("sorted expectation equals brute force, float and exact") {
  Rng rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const int S = 2 + rng.below(3);
    const int A = 2 + rng.below(2);
    const MdpF mdp = testgen::random_mdp(rng, S, A);
    const int s = rng.below(S);
    const auto u = random_scores<double>(rng, S, A);
    CHECK(expected_max_sorted(mdp, s, u) ==
          doctest::Approx(expected_max_bruteforce(mdp, s, u)).epsilon(1e-12));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int S = 2 + rng.below(2);
    const MdpQ mdp = testgen::random_rational_mdp(rng, S, 2);
    const int s = rng.below(S);
    const auto u = random_scores<Rational>(rng, S, 2);
    CHECK(expected_max_sorted(mdp, s, u) == expected_max_bruteforce(mdp, s, u));
  }
}

TEST_CASE("ties across pairs do not break the sorted expectation") {
  MdpQ mdp;
  mdp.states = {"a", "b"};
  mdp.actions = {"u", "w"};
  const Rational h = Rational(1) / 2;
  mdp.kernel = {{{h, h}, {h, h}}, {{h, h}, {h, h}}};
  mdp.rewards = {{0, 0}, {0, 0}};
  mdp.recompute_r_max();
  ScoreMatrix<Rational> u = {{1, 1}, {1, 0}};  // three-way tie at the top
  CHECK(expected_max_sorted(mdp, 0, u) == expected_max_bruteforce(mdp, 0, u));
}

TEST_CASE("score-sorted ordering maximizes the partition-weighted score") {
  // Over all orderings of the pairs, sum_i mu_i(m) u(m_i) peaks at the sorted
  // one (it equals the expected maximum there; any other first-match value is
  // dominated pointwise).
  Rng rng(89);
  for (int trial = 0; trial < 10; ++trial) {
    const int S = 3, A = 2;  // SA = 6 -> 720 orderings
    const MdpQ mdp = testgen::random_rational_mdp(rng, S, A);
    const int s = rng.below(S);
    const auto u = random_scores<Rational>(rng, S, A);
    const Rational best = expected_max_sorted(mdp, s, u);

    OrderingList m;
    for (int st = 0; st < S; ++st)
      for (int a = 0; a < A; ++a) m.push_back({st, a});
    std::sort(m.begin(), m.end(), [](const ScoredPair& x, const ScoredPair& y) {
      return std::tie(x.state, x.action) < std::tie(y.state, y.action);
    });
    int checked = 0;
    do {
      const auto mu = event_probabilities(mdp, s, m);
      Rational val = 0;
      for (std::size_t i = 0; i < m.size(); ++i) val += mu[i] * u[m[i].state][m[i].action];
      CHECK(val <= best);
      ++checked;
    } while (std::next_permutation(m.begin(), m.end(), [](const ScoredPair& x, const ScoredPair& y) {
      return std::tie(x.state, x.action) < std::tie(y.state, y.action);
    }));
    CHECK(checked == 720);
  }
}

TEST_CASE("reduced fixed point equals the augmented solve, state by state") {
  Rng rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    const int S = 2 + rng.below(3);
    const int A = 2 + rng.below(2);
    const MdpF mdp = testgen::random_mdp(rng, S, A);
    const double gamma = trial % 2 ? 0.9 : 0.5;

    const auto reduced = solve_onestep_discounted(mdp, gamma, 1e-9);

    std::vector<int> roots(S);
    for (int s = 0; s < S; ++s) roots[s] = s;
    const auto aug = build_augmented_mdp(mdp, roots, 1);
    const auto vi = value_iteration_discounted(aug.mdp, gamma, 1e-9);
    for (int s = 0; s < S; ++s) {
      const double tower = lookahead_start_value(mdp, s, 1, aug, vi.v);
      CHECK(reduced.v[s] == doctest::Approx(tower).epsilon(1e-7));
    }
  }
}

TEST_CASE("look-ahead can only help: reduced value dominates the classical one") {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const MdpF mdp = testgen::random_mdp(rng, 4, 3);
    const auto v0 = value_iteration_discounted(mdp, 0.9, 1e-9);
    const auto v1 = solve_onestep_discounted(mdp, 0.9, 1e-9);
    for (int s = 0; s < 4; ++s) CHECK(v1.v[s] >= v0.v[s] - 1e-8);
  }
  // deterministic kernels reveal nothing: equality
  for (int trial = 0; trial < 10; ++trial) {
    const MdpF mdp = testgen::random_deterministic_mdp(rng, 4, 2);
    const auto v0 = value_iteration_discounted(mdp, 0.9, 1e-10);
    const auto v1 = solve_onestep_discounted(mdp, 0.9, 1e-10);
    for (int s = 0; s < 4; ++s) CHECK(v1.v[s] == doctest::Approx(v0.v[s]).epsilon(1e-8));
  }
}

TEST_CASE("separation oracle accepts the fixed point and cuts off low points") {
  Rng rng(103);
  const MdpF mdp = testgen::random_mdp(rng, 4, 2);
  const double gamma = 0.9;
  const auto solve = solve_onestep_discounted(mdp, gamma, 1e-10);

  CHECK(separation_oracle(mdp, gamma, solve.v).feasible);

  std::vector<double> low(4, 0.0);
  const auto cut = separation_oracle(mdp, gamma, low);
  REQUIRE(!cut.feasible);
  REQUIRE(cut.cut.has_value());
  // the reported cut is violated at `low` by exactly `violation`
  double lhs = 0;
  for (int s = 0; s < 4; ++s) lhs += cut.cut->coef[s] * low[s];
  CHECK(lhs == doctest::Approx(cut.cut->rhs - cut.cut->violation));
  // and satisfied at the fixed point
  double lhs_star = 0;
  for (int s = 0; s < 4; ++s) lhs_star += cut.cut->coef[s] * solve.v[s];
  CHECK(lhs_star >= cut.cut->rhs - 1e-9);
}

TEST_CASE("constraint generation reproduces the reduced fixed point") {
  Rng rng(107);
  for (int trial = 0; trial < 6; ++trial) {
    const MdpF mdp = testgen::random_mdp(rng, 3 + trial % 2, 2);
    const double gamma = trial % 2 ? 0.8 : 0.5;
    const auto vi = solve_onestep_discounted(mdp, gamma, 1e-10);
    const auto cg = solve_onestep_discounted_cg(mdp, gamma);
    REQUIRE(cg.converged);
    for (int s = 0; s < mdp.num_states(); ++s)
      CHECK(cg.v[s] == doctest::Approx(vi.v[s]).epsilon(1e-6));
  }
}

TEST_CASE("greedy one-look-ahead policy achieves the reduced value") {
  // Simulate the greedy policy through the depth-1 augmented process: its
  // discounted value from the start tuple distribution must equal v*.
  Rng rng(109);
  const MdpF mdp = testgen::random_mdp(rng, 3, 2);
  const double gamma = 0.9;
  const auto solve = solve_onestep_discounted(mdp, gamma, 1e-11);

  std::vector<int> roots = {0, 1, 2};
  const auto aug = build_augmented_mdp(mdp, roots, 1);
  const auto pi = greedy_lookahead_policy(mdp, gamma, solve.v, aug);
  const auto v_pi = policy_evaluation_discounted(aug.mdp, pi, gamma);
  for (int s = 0; s < 3; ++s) {
    double tower = 0;
    for (const auto& [xi, w] : initial_lookahead_distribution(mdp, s, 1).support)
      tower += w * v_pi[aug.index_of(xi)];
    CHECK(tower == doctest::Approx(solve.v[s]).epsilon(1e-7));
  }
}

TEST_CASE("reduced average solve matches the augmented average solve") {
  Rng rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    const int S = 2 + rng.below(3);
    const MdpF mdp = testgen::random_mdp(rng, S, 2);
    const auto reduced = solve_onestep_average(mdp, 1e-10);

    std::vector<int> roots(S);
    for (int s = 0; s < S; ++s) roots[s] = s;
    const auto aug = build_augmented_mdp(mdp, roots, 1);
    const auto full = average_reward_solve(aug.mdp, 1e-10);
    CHECK(reduced.gb.gain == doctest::Approx(full.gb.gain).epsilon(1e-7));
  }
}

TEST_CASE("average-criterion constraint generation matches the iterative gain") {
  Rng rng(127);
  for (int trial = 0; trial < 5; ++trial) {
    const MdpF mdp = testgen::random_mdp(rng, 3, 2);
    const auto it = solve_onestep_average(mdp, 1e-10);
    const auto cg = solve_onestep_average_cg(mdp);
    REQUIRE(cg.converged);
    CHECK(!cg.box_hit);
    CHECK(cg.gb.gain == doctest::Approx(it.gb.gain).epsilon(1e-6));
  }
}

TEST_CASE("iteration caps surface as convergence errors") {
  Rng rng(131);
  const MdpF mdp = testgen::random_mdp(rng, 3, 2);
  CHECK_THROWS_AS(solve_onestep_discounted(mdp, 0.99, 1e-12, 1, 3), ConvergenceError);
}

TEST_CASE("threaded reduced solve equals the single-thread one") {
  Rng rng(137);
  const MdpF mdp = testgen::random_mdp(rng, 5, 3);
  const auto a = solve_onestep_discounted(mdp, 0.9, 1e-10, 1);
  const auto b = solve_onestep_discounted(mdp, 0.9, 1e-10, 4);
  for (int s = 0; s < 5; ++s) CHECK(a.v[s] == b.v[s]);
}
