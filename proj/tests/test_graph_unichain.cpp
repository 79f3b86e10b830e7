#include "doctest.h"

#include "mdplook/graph_algo.hpp"
#include "mdplook/unichain.hpp"
#include "support/gen.hpp"

using namespace mdplook;

TEST_CASE("strongly connected components of a two-cycle plus tail") {
  // 0 <-> 1, 2 -> 0: components {0,1} and {2}; {0,1} is closed.
  std::vector<std::vector<int>> adj = {{1}, {0}, {0}};
  const auto scc = strongly_connected_components(adj);
  CHECK(scc.count == 2);
  CHECK(scc.component[0] == scc.component[1]);
  CHECK(scc.component[2] != scc.component[0]);
  const auto closed = closed_components(adj, scc);
  CHECK(closed.size() == 1);
  CHECK(closed[0] == scc.component[0]);
}

TEST_CASE("component ids are ordered so successors come first") {
  // chain 0 -> 1 -> 2 of singletons: id(2) < id(1) < id(0) lets linear solves
  // sweep blocks in increasing id order.
  std::vector<std::vector<int>> adj = {{1}, {2}, {}};
  const auto scc = strongly_connected_components(adj);
  CHECK(scc.component[2] < scc.component[1]);
  CHECK(scc.component[1] < scc.component[0]);
}

TEST_CASE("full-support random instances are unichain") {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const MdpF mdp = testgen::random_mdp(rng, 4, 3);
    const auto rep = check_unichain_exhaustive(mdp);
    CHECK(rep.unichain);
    CHECK(!rep.budget_exceeded);
  }
}

TEST_CASE("two absorbing states break the unichain property") {
  MdpF mdp;
  mdp.states = {"a", "b"};
  mdp.actions = {"u"};
  mdp.kernel = {{{1.0, 0.0}, {0.0, 1.0}}};
  mdp.rewards = {{0.0}, {1.0}};
  mdp.recompute_r_max();
  const auto rep = check_unichain_exhaustive(mdp);
  CHECK(!rep.unichain);
  REQUIRE(rep.witness_policy.has_value());
  CHECK(rep.witness_policy->size() == 2);
}

TEST_CASE("unichain check is refused above the policy budget") {
  Rng rng(6);
  const MdpF mdp = testgen::random_mdp(rng, 4, 3);  // 81 deterministic policies
  const auto rep = check_unichain_exhaustive(mdp, 10);
  CHECK(rep.budget_exceeded);
  CHECK(!rep.unichain);
}
