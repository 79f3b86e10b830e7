#include "doctest.h"

#include <map>

#include "mdplook/io.hpp"
#include "mdplook/mdp.hpp"
#include "support/gen.hpp"

using namespace mdplook;

namespace {

MdpF two_state() {
  MdpF mdp;
  mdp.states = {"L", "R"};
  mdp.actions = {"stay", "go"};
  mdp.kernel = {{{1.0, 0.0}, {0.0, 1.0}}, {{0.2, 0.8}, {0.7, 0.3}}};
  mdp.rewards = {{0.0, 1.0}, {2.0, 0.5}};
  mdp.gamma = 0.9;
  mdp.initial_state = 0;
  mdp.recompute_r_max();
  return mdp;
}

}  // namespace

TEST_CASE("validate accepts a well-formed model") {
  const auto rep = validate_mdp(two_state());
  CHECK(rep.pass);
  CHECK(rep.violations.empty());
}

TEST_CASE("validate flags bad rows and shape mismatches") {
  MdpF mdp = two_state();
  mdp.kernel[0][0] = {0.5, 0.4};  // sums to 0.9
  CHECK(!validate_mdp(mdp).pass);

  mdp = two_state();
  mdp.kernel[1][1][0] = -0.1;
  mdp.kernel[1][1][1] = 1.1;
  CHECK(!validate_mdp(mdp).pass);

  mdp = two_state();
  mdp.rewards.pop_back();
  CHECK(!validate_mdp(mdp).pass);

  mdp = two_state();
  mdp.states[1] = "L";  // duplicate name
  CHECK(!validate_mdp(mdp).pass);

  mdp = two_state();
  mdp.gamma = 1.5;
  CHECK(!validate_mdp(mdp).pass);
}

TEST_CASE("float round trip through text") {
  const MdpF mdp = two_state();
  const auto var = parse_mdp_text(mdp_to_text(mdp));
  REQUIRE(std::holds_alternative<MdpF>(var));
  const MdpF& back = std::get<MdpF>(var);
  CHECK(back.states == mdp.states);
  CHECK(back.actions == mdp.actions);
  CHECK(back.kernel == mdp.kernel);
  CHECK(back.rewards == mdp.rewards);
  CHECK(back.gamma == mdp.gamma);
  CHECK(back.initial_state == mdp.initial_state);
}

TEST_CASE("rational round trip keeps fractions exact") {
  Rng rng(11);
  const MdpQ mdp = testgen::random_rational_mdp(rng, 3, 2);
  const auto var = parse_mdp_text(mdp_to_text(mdp));
  REQUIRE(std::holds_alternative<MdpQ>(var));
  const MdpQ& back = std::get<MdpQ>(var);
  CHECK(back.kernel == mdp.kernel);
  CHECK(back.rewards == mdp.rewards);
}

TEST_CASE("unknown fields are rejected, not ignored") {
  std::string text = mdp_to_text(two_state());
  text.insert(text.rfind('}'), ", \"extraneous\": 1");
  CHECK_THROWS_AS(parse_mdp_text(text), ParseError);
}

TEST_CASE("missing required fields are named in the error") {
  CHECK_THROWS_WITH_AS(parse_mdp_text("{\"states\": [\"x\"]}"),
                       doctest::Contains("actions"), ParseError);
}

TEST_CASE("mode mismatch and malformed numerics") {
  CHECK_THROWS_AS(parse_mdp_text("not json"), ParseError);
  CHECK_THROWS_AS(parse_mdp_text("{\"mode\": \"decimal\", \"states\": [], \"actions\": [], "
                                 "\"transitions\": [], \"rewards\": []}"),
                  ParseError);
}

TEST_CASE("float conversion is exact for dyadic data and refused above 2^53") {
  MdpQ q;
  q.states = {"a", "b"};
  q.actions = {"u"};
  q.kernel = {{{Rational(1) / 4, Rational(3) / 4}, {Rational(1), Rational(0)}}};
  q.rewards = {{Rational(5) / 2}, {Rational(0)}};
  q.recompute_r_max();
  const MdpF f = mdp_to_float(q);
  CHECK(f.kernel[0][0][0] == 0.25);
  CHECK(f.rewards[0][0] == 2.5);

  q.rewards[0][0] = rat_pow(Rational(2), 60);
  q.recompute_r_max();
  CHECK_THROWS_AS(mdp_to_float(q), PrecisionError);
}

TEST_CASE("distribution bookkeeping") {
  Distribution<int, double> d;
  d.support = {{0, 0.25}, {2, 0.75}};
  CHECK(d.total() == doctest::Approx(1.0));
}

TEST_CASE("transition sampling follows the kernel") {
  const MdpF mdp = two_state();
  Rng rng(3);
  std::map<int, int> counts;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) ++counts[sample_transition(mdp, 0, 1, rng)];
  CHECK(std::abs(counts[0] / double(trials) - 0.2) < 0.01);
  CHECK(std::abs(counts[1] / double(trials) - 0.8) < 0.01);
  // deterministic row always lands on the same state
  for (int i = 0; i < 100; ++i) CHECK(sample_transition(mdp, 1, 0, rng) == 1);
}
