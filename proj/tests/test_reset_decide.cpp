#include "doctest.h"

#include "mdplook/decide.hpp"
#include "mdplook/reset.hpp"
#include "support/gen.hpp"

using namespace mdplook;

TEST_CASE("reset transform mixes rows toward the target") {
  Rng rng(211);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  const Rational g = Rational(3) / 4;
  const MdpQ out = reset_transform(mdp, g, 1);
  CHECK(validate_mdp(out).pass);
  CHECK(!out.gamma.has_value());
  for (int a = 0; a < 2; ++a)
    for (int s = 0; s < 3; ++s)
      for (int t = 0; t < 3; ++t) {
        const Rational want = g * mdp.kernel[a][s][t] + (t == 1 ? (1 - g) : Rational(0));
        CHECK(out.kernel[a][s][t] == want);
      }
  // rewards are untouched
  CHECK(out.rewards == mdp.rewards);
}

TEST_CASE("reset transform accepts distribution targets and validates them") {
  Rng rng(223);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  Distribution<int, Rational> target;
  target.support = {{0, Rational(1) / 3}, {2, Rational(2) / 3}};
  const Rational half = Rational(1) / 2;
  const MdpQ out = reset_transform(mdp, half, target);
  CHECK(validate_mdp(out).pass);
  CHECK(out.kernel[0][1][0] ==
        mdp.kernel[0][1][0] / 2 + Rational(1) / 2 * Rational(1) / 3);

  Distribution<int, Rational> bad;
  bad.support = {{0, Rational(1) / 2}};  // mass 1/2 only
  CHECK_THROWS_AS(reset_transform(mdp, half, bad), std::invalid_argument);
  Distribution<int, Rational> oob;
  oob.support = {{7, Rational(1)}};
  CHECK_THROWS_AS(reset_transform(mdp, half, oob), std::invalid_argument);
  CHECK_THROWS_AS(reset_transform(mdp, Rational(2), 0), std::invalid_argument);
}

TEST_CASE("renewal identity holds exactly in rational arithmetic") {
  Rng rng(227);
  for (int trial = 0; trial < 10; ++trial) {
    const MdpQ mdp = testgen::random_rational_mdp(rng, 2 + rng.below(3), 2);
    const auto pi = testgen::random_policy(rng, mdp);
    const Rational g = Rational(1 + rng.below(8)) / 9;
    const int s0 = rng.below(mdp.num_states());
    CHECK(verify_renewal_identity(mdp, g, s0, pi) == 0);
  }
}

TEST_CASE("renewal identity holds for stochastic policies and float mode") {
  Rng rng(229);
  for (int trial = 0; trial < 10; ++trial) {
    const MdpF mdp = testgen::random_mdp(rng, 4, 2);
    const auto pi = testgen::random_stochastic_policy(rng, mdp);
    CHECK(verify_renewal_identity(mdp, 0.9, 0, pi) < 1e-9);
  }
}

TEST_CASE("threshold decisions report margins and agree with the solve") {
  Rng rng(233);
  const MdpF mdp = testgen::random_mdp(rng, 4, 2);
  const double gamma = 0.9;
  const auto solve = solve_onestep_discounted(mdp, gamma, 1e-10);
  const double vstar = solve.v[2];

  const auto yes = decide_dvdp(mdp, 1, 2, gamma, vstar - 1e-4);
  CHECK(yes.yes);
  CHECK(yes.margin == doctest::Approx(1e-4).epsilon(1e-3));
  const auto no = decide_dvdp(mdp, 1, 2, gamma, vstar + 1e-4);
  CHECK(!no.yes);

  const auto avg = solve_onestep_average(mdp, 1e-10);
  CHECK(decide_ardp(mdp, 1, avg.gb.gain - 1e-5).yes);
  CHECK(!decide_ardp(mdp, 1, avg.gb.gain + 1e-5).yes);
}

TEST_CASE("decisions at depth zero and at brute-force depth two are consistent") {
  Rng rng(239);
  const MdpF mdp = testgen::random_mdp(rng, 3, 2);
  const double gamma = 0.5;
  const auto v0 = value_iteration_discounted(mdp, gamma, 1e-10);
  CHECK(decide_dvdp(mdp, 0, 1, gamma, v0.v[1] - 1e-6).yes);
  CHECK(!decide_dvdp(mdp, 0, 1, gamma, v0.v[1] + 1e-6).yes);

  // look-ahead two dominates look-ahead one
  const auto d2 = decide_dvdp(mdp, 2, 1, gamma, 0.0);
  const auto d1 = decide_dvdp(mdp, 1, 1, gamma, 0.0);
  CHECK(d2.value >= d1.value - 1e-7);
}

TEST_CASE("discounted-to-average transfer through the reset transform") {
  // Threshold queries against v*(s0) transfer to gain queries against
  // (1-gamma) theta on the reset chain, on both sides of the cut.
  Rng rng(241);
  for (int trial = 0; trial < 5; ++trial) {
    const MdpF mdp = testgen::random_mdp(rng, 3, 2);
    const double gamma = trial % 2 ? 0.9 : 0.5;
    const int s0 = rng.below(3);
    const auto v = value_iteration_discounted(mdp, gamma, 1e-11);
    const MdpF reset = reset_transform(mdp, gamma, s0);
    for (const double delta : {-1e-2, -1e-4, 1e-4, 1e-2}) {
      const double theta = v.v[s0] + delta;
      const auto direct = decide_dvdp(mdp, 0, s0, gamma, theta);
      const auto transferred = decide_ardp(reset, 0, (1 - gamma) * theta);
      CHECK(direct.yes == transferred.yes);
    }
  }
}
