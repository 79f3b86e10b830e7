#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdplook/mdp.hpp"
#include "mdplook/numeric.hpp"

namespace mdplook {

// Undirected graph, vertices 0..n-1; edge index = input order (0-based here,
// 1-based in files and in the derived magnitudes).
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  int num_vertices() const { return n; }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

Graph parse_graph_text(const std::string& text);
Graph load_graph(const std::string& path);

struct RegularityReport {
  bool regular = false;
  int degree = 0;
  int offending_vertex = -1;  // first vertex whose degree differs, -1 if none
};
RegularityReport check_regular(const Graph& g, int degree);

// Law of the look-ahead payoff revealed one step below a vertex state: one
// atom per incident edge, the bonus atom, and the zero atom.
struct XvAtom {
  Rational value;
  Rational prob;
};
struct XvLaw {
  int vertex = 0;
  std::vector<XvAtom> atoms;
  Rational expectation() const;
  Rational total_mass() const;
};

struct GadgetThresholds {
  int n = 0;
  int m = 0;
  int k = 0;
  Rational mu;
  Rational rho0;                // 1/n^k, the assumed reveal probability
  Rational soundness_coeff;     // k*mu - 1
  Rational completeness_coeff;  // k*mu - 2/m
  Rational gamma_min_exact;     // equality point of the two bounds
  Rational gamma_min_stated;    // first-order relaxation, always below exact
  Rational gamma;               // instance discount, dyadic, above exact
  Rational expected_gamma_tau;  // at (gamma, rho0)
  Rational soundness_bound;     // gamma^3 * soundness_coeff
  Rational completeness_bound;  // completeness_coeff * gamma^3 * E[gamma^tau]
};

struct GadgetInstance {
  Graph graph;
  int k = 0;
  int num_actions = 0;
  MdpQ mdp;
  Rational mu;
  Rational gamma;
  GadgetThresholds bounds;
  int s0 = 0;
  int s1 = 1;
  std::vector<int> sv;  // vertex state ids
  std::vector<int> se;  // edge state ids
  int sB = 0;
  int sN = 0;
  int sT = 0;
  Rational qb_scale_max;  // max_v P(bonus | s_v, a_1) * m^{8m}
  std::string action_count_note;
};

// E[gamma^tau] for tau geometric on {1,2,...} with the given success
// probability; equals gamma when success is certain.
Rational expected_gamma_tau(const Rational& gamma, const Rational& success_prob);

// Number of surjections from a set of `slots` onto a set of `targets`.
Integer count_surjections(int slots, int targets);

GadgetThresholds compute_thresholds(int n, int m, int k, const Rational& mu,
                                    const std::optional<Rational>& fixed_gamma = std::nullopt);

GadgetInstance build_gadget_mdp(const Graph& g, int k);

GadgetThresholds thresholds(const GadgetInstance& inst);

XvLaw xv_law(const GadgetInstance& inst, int v);

// Exact E[max_{v in Y} X_v] over independent per-vertex laws, by exhaustive
// expansion of the product of supports.
Rational expected_max_subset(const GadgetInstance& inst, const std::vector<int>& Y,
                             long long budget = 10000000);

std::pair<std::vector<int>, Rational> best_subset_bruteforce(const GadgetInstance& inst, int k,
                                                             long long budget = 10000000);

std::pair<std::vector<int>, int> max_independent_set_bruteforce(const Graph& g);

// Lexicographically first independent set of size exactly k, if any.
std::optional<std::vector<int>> first_independent_set(const Graph& g, int k);

struct GadgetSeparationReport {
  bool has_independent_set = false;
  std::optional<std::vector<int>> sstar;
  std::optional<bool> soundness_ok;  // set when no size-k independent set
  std::vector<int> worst_subset;
  Rational worst_value;
  std::optional<bool> completeness_ok;  // set when sstar exists
  Rational sstar_value;
  bool separation_ok = false;  // soundness_bound < completeness_bound at gamma
  GadgetThresholds bounds;
  std::vector<std::string> findings;
  bool pass() const { return findings.empty(); }
};
GadgetSeparationReport verify_separation(const GadgetInstance& inst);

struct WaitingPolicyCheck {
  std::vector<int> sstar;
  Rational match_prob;         // exact P(revealed vertex set contains sstar)
  Rational expected_max_sstar;
  Rational closed_form;        // start-distribution value of the waiting policy
  Rational target;             // completeness bound at the instance gamma
  bool chain_evaluated = false;
  long long chain_states = 0;
  Rational chain_value;
  bool matches_closed_form = false;
  bool meets_target = false;
};

// Evaluates the policy that loops at the root until the two-step look-ahead
// reveals a superset of sstar, then walks greedily to the best revealed
// payoff. With evaluate_chain, the value is recomputed by exact policy
// evaluation on the reachable two-step augmented chain and must equal the
// closed form.
WaitingPolicyCheck verify_waiting_policy(const GadgetInstance& inst, bool evaluate_chain);

// |g(reset chain) - (1-gamma) * start value| for the waiting policy on the
// two-step augmented chain with a start-distribution reset; exact, expect 0.
Rational waiting_policy_renewal_residual(const GadgetInstance& inst);

}  // namespace mdplook
