#include "mdplook/gadget.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mdplook/augment.hpp"
#include "mdplook/linear.hpp"

namespace mdplook {

Graph parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  Graph g;
  long long n = 0, m = 0;
  if (!(in >> n >> m)) throw ParseError("graph file must start with \"n m\"");
  if (n < 1 || n > 100000) throw ParseError("vertex count out of range");
  if (m < 0 || m > 1000000) throw ParseError("edge count out of range");
  g.n = static_cast<int>(n);
  std::vector<std::vector<char>> seen(g.n, std::vector<char>(g.n, 0));
  for (long long i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw ParseError("expected " + std::to_string(m) + " edge lines");
    if (u < 1 || u > n || v < 1 || v > n) throw ParseError("edge endpoint out of range");
    if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u));
    const int a = static_cast<int>(u - 1), b = static_cast<int>(v - 1);
    if (seen[a][b]) throw ParseError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    seen[a][b] = seen[b][a] = 1;
    g.edges.emplace_back(a, b);
  }
  std::string extra;
  if (in >> extra) throw ParseError("unexpected trailing content: " + extra);
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph_text(buf.str());
}

RegularityReport check_regular(const Graph& g, int degree) {
  std::vector<int> deg(g.n, 0);
  for (const auto& [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  RegularityReport rep;
  rep.degree = degree;
  rep.regular = true;
  for (int v = 0; v < g.n; ++v)
    if (deg[v] != degree) {
      rep.regular = false;
      rep.offending_vertex = v;
      break;
    }
  return rep;
}

Rational XvLaw::expectation() const {
  Rational e = 0;
  for (const auto& atom : atoms) e += atom.value * atom.prob;
  return e;
}

Rational XvLaw::total_mass() const {
  Rational t = 0;
  for (const auto& atom : atoms) t += atom.prob;
  return t;
}

Rational expected_gamma_tau(const Rational& gamma, const Rational& success_prob) {
  if (sgn(success_prob) <= 0 || success_prob > 1)
    throw std::invalid_argument("success probability must lie in (0,1]");
  return success_prob * gamma / (1 - gamma * (1 - success_prob));
}

Integer count_surjections(int slots, int targets) {
  if (targets < 0 || slots < 0) throw std::invalid_argument("negative set size");
  Integer total = 0;
  Integer binom = 1;  // C(targets, i), updated incrementally
  for (int i = 0; i <= targets; ++i) {
    const Integer term = binom * int_pow(Integer(targets - i), static_cast<unsigned long>(slots));
    total += (i % 2 == 0) ? term : -term;
    binom = binom * (targets - i) / (i + 1);
  }
  return total;
}

GadgetThresholds compute_thresholds(int n, int m, int k, const Rational& mu,
                                    const std::optional<Rational>& fixed_gamma) {
  GadgetThresholds th;
  th.n = n;
  th.m = m;
  th.k = k;
  th.mu = mu;
  th.soundness_coeff = Rational(k) * mu - 1;
  th.completeness_coeff = Rational(k) * mu - Rational(2) / Rational(m);
  if (sgn(th.soundness_coeff) <= 0)
    throw std::invalid_argument("degenerate instance: k*mu must exceed 1");
  th.rho0 = Rational(1) / Rational(int_pow(Integer(n), static_cast<unsigned long>(k)));

  // Equality point of completeness_coeff * g^3 * E[g^tau] = soundness_coeff * g^3.
  const Rational& s = th.soundness_coeff;
  th.gamma_min_exact = s / (s + th.rho0 * (th.completeness_coeff - s));
  th.gamma_min_stated = 1 - (th.completeness_coeff / s - 1) * th.rho0;

  th.gamma = fixed_gamma ? *fixed_gamma : dyadic_round_up(th.gamma_min_exact);
  if (sgn(th.gamma) <= 0 || th.gamma >= 1) throw std::invalid_argument("gamma must lie in (0,1)");
  th.expected_gamma_tau = expected_gamma_tau(th.gamma, th.rho0);
  const Rational g3 = rat_pow(th.gamma, 3);
  th.soundness_bound = g3 * th.soundness_coeff;
  th.completeness_bound = th.completeness_coeff * g3 * th.expected_gamma_tau;
  return th;
}

GadgetInstance build_gadget_mdp(const Graph& g, int k) {
  const auto reg = check_regular(g, 3);
  if (!reg.regular)
    throw std::invalid_argument("graph is not 3-regular (vertex " +
                                std::to_string(reg.offending_vertex + 1) + ")");
  if (k < 1 || k > g.n) throw std::invalid_argument("subset size k out of range");

  GadgetInstance inst;
  inst.graph = g;
  inst.k = k;
  inst.num_actions = std::max(k, 2);
  inst.action_count_note =
      "action count fixed to max(k,2) so the depth-2 look-ahead can reveal k distinct vertices";

  const int n = g.n;
  const int m = g.num_edges();
  const Integer big_m = Integer(m);
  const Rational bonus_reward = Rational(int_pow(big_m, static_cast<unsigned long>(10 * m)));

  std::vector<std::vector<int>> incident(n);  // edge ids per vertex, input order
  for (int e = 0; e < m; ++e) {
    incident[g.edges[e].first].push_back(e);
    incident[g.edges[e].second].push_back(e);
  }
  // Per-edge magnitudes from the 1-based edge index p: reward m^{4p},
  // reveal probability m^{-2p}, expectation contribution m^{2p}.
  std::vector<Rational> edge_reward(m), edge_prob(m), edge_weight(m);
  for (int e = 0; e < m; ++e) {
    const auto p = static_cast<unsigned long>(e + 1);
    edge_weight[e] = Rational(int_pow(big_m, 2 * p));
    edge_reward[e] = Rational(int_pow(big_m, 4 * p));
    edge_prob[e] = Rational(1) / edge_weight[e];
  }

  Rational mu = 0;  // max_v sum of incident expectation contributions, plus 1
  for (int v = 0; v < n; ++v) {
    Rational sum = 0;
    for (int e : incident[v]) sum += edge_weight[e];
    mu = std::max(mu, sum);
  }
  mu += 1;
  inst.mu = mu;

  MdpQ& mdp = inst.mdp;
  const int S = 2 + n + m + 3;
  const int A = inst.num_actions;
  inst.s0 = 0;
  inst.s1 = 1;
  inst.sv.resize(n);
  inst.se.resize(m);
  mdp.states = {"s0", "s1"};
  for (int v = 0; v < n; ++v) {
    inst.sv[v] = static_cast<int>(mdp.states.size());
    mdp.states.push_back("v" + std::to_string(v + 1));
  }
  for (int e = 0; e < m; ++e) {
    inst.se[e] = static_cast<int>(mdp.states.size());
    mdp.states.push_back("e" + std::to_string(e + 1));
  }
  inst.sB = static_cast<int>(mdp.states.size());
  mdp.states.push_back("sB");
  inst.sN = inst.sB + 1;
  mdp.states.push_back("sN");
  inst.sT = inst.sN + 1;
  mdp.states.push_back("sT");
  for (int a = 0; a < A; ++a) mdp.actions.push_back("a" + std::to_string(a + 1));

  mdp.kernel.assign(A, std::vector<std::vector<Rational>>(S, std::vector<Rational>(S, Rational(0))));
  mdp.rewards.assign(S, std::vector<Rational>(A, Rational(0)));

  // s0: first action loops, the rest move to s1.
  mdp.kernel[0][inst.s0][inst.s0] = 1;
  for (int a = 1; a < A; ++a) mdp.kernel[a][inst.s0][inst.s1] = 1;
  // s1: every action draws a vertex uniformly.
  for (int a = 0; a < A; ++a)
    for (int v = 0; v < n; ++v) mdp.kernel[a][inst.s1][inst.sv[v]] = Rational(1, n);
  // Vertex states: the first action reveals an incident edge, the bonus, or
  // nothing; any other action is wasted.
  Rational qb_scale_max = 0;
  const Rational m8 = Rational(int_pow(big_m, static_cast<unsigned long>(8 * m)));
  for (int v = 0; v < n; ++v) {
    Rational edge_mass = 0, weight_sum = 0;
    for (int e : incident[v]) {
      mdp.kernel[0][inst.sv[v]][inst.se[e]] = edge_prob[e];
      edge_mass += edge_prob[e];
      weight_sum += edge_weight[e];
    }
    const Rational qb = (mu - weight_sum) / bonus_reward;  // makes E[next reward] = mu
    if (sgn(qb) < 0) throw std::logic_error("negative bonus mass; mu too small");
    mdp.kernel[0][inst.sv[v]][inst.sB] = qb;
    mdp.kernel[0][inst.sv[v]][inst.sN] = 1 - edge_mass - qb;
    if (sgn(mdp.kernel[0][inst.sv[v]][inst.sN]) < 0)
      throw std::logic_error("vertex row mass exceeds 1");
    for (int a = 1; a < A; ++a) mdp.kernel[a][inst.sv[v]][inst.sN] = 1;
    qb_scale_max = std::max(qb_scale_max, Rational(qb * m8));
  }
  inst.qb_scale_max = qb_scale_max;
  // Edge states and both special states drain into the absorbing terminal.
  for (int a = 0; a < A; ++a) {
    for (int e = 0; e < m; ++e) mdp.kernel[a][inst.se[e]][inst.sT] = 1;
    mdp.kernel[a][inst.sB][inst.sT] = 1;
    mdp.kernel[a][inst.sN][inst.sT] = 1;
    mdp.kernel[a][inst.sT][inst.sT] = 1;
  }
  // State-based rewards, identical across actions.
  for (int e = 0; e < m; ++e)
    for (int a = 0; a < A; ++a) mdp.rewards[inst.se[e]][a] = edge_reward[e];
  for (int a = 0; a < A; ++a) mdp.rewards[inst.sB][a] = bonus_reward;

  inst.bounds = compute_thresholds(n, m, k, mu);
  inst.gamma = inst.bounds.gamma;
  mdp.gamma = inst.gamma;
  mdp.initial_state = inst.s0;
  mdp.recompute_r_max();

  const auto report = validate_mdp(mdp);
  if (!report.pass) throw std::logic_error("constructed instance failed validation");
  return inst;
}

GadgetThresholds thresholds(const GadgetInstance& inst) { return inst.bounds; }

XvLaw xv_law(const GadgetInstance& inst, int v) {
  if (v < 0 || v >= inst.graph.n) throw std::invalid_argument("vertex out of range");
  XvLaw law;
  law.vertex = v;
  const auto& row = inst.mdp.kernel[0][inst.sv[v]];
  for (int e = 0; e < inst.graph.num_edges(); ++e)
    if (sgn(row[inst.se[e]]) != 0)
      law.atoms.push_back({inst.mdp.rewards[inst.se[e]][0], row[inst.se[e]]});
  law.atoms.push_back({inst.mdp.rewards[inst.sB][0], row[inst.sB]});
  law.atoms.push_back({Rational(0), row[inst.sN]});
  return law;
}

Rational expected_max_subset(const GadgetInstance& inst, const std::vector<int>& Y,
                             long long budget) {
  std::vector<int> ys(Y);
  std::sort(ys.begin(), ys.end());
  if (std::adjacent_find(ys.begin(), ys.end()) != ys.end())
    throw std::invalid_argument("subset contains a duplicate vertex");
  std::vector<XvLaw> laws;
  laws.reserve(ys.size());
  long long combos = 1;
  for (int v : ys) {
    laws.push_back(xv_law(inst, v));
    combos *= static_cast<long long>(laws.back().atoms.size());
    if (combos > budget) throw BudgetError("product of supports exceeds budget");
  }
  Rational total = 0;
  std::function<void(std::size_t, Rational, Rational)> rec = [&](std::size_t idx, Rational prob,
                                                                 Rational best) {
    if (idx == laws.size()) {
      total += prob * best;
      return;
    }
    for (const auto& atom : laws[idx].atoms)
      rec(idx + 1, prob * atom.prob, std::max(best, atom.value));
  };
  rec(0, Rational(1), Rational(0));
  return total;
}

namespace {

// Enumerates size-k vertex subsets in lexicographic order.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    if (!fn(pick)) return;
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) return;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

bool is_independent(const std::vector<std::uint32_t>& adj_mask, const std::vector<int>& pick) {
  std::uint32_t mask = 0;
  for (int v : pick) mask |= std::uint32_t(1) << v;
  for (int v : pick)
    if (adj_mask[v] & mask) return false;
  return true;
}

std::vector<std::uint32_t> adjacency_masks(const Graph& g) {
  if (g.n > 20) throw BudgetError("exhaustive subset search capped at 20 vertices");
  std::vector<std::uint32_t> adj(g.n, 0);
  for (const auto& [u, v] : g.edges) {
    adj[u] |= std::uint32_t(1) << v;
    adj[v] |= std::uint32_t(1) << u;
  }
  return adj;
}

}  // namespace

std::pair<std::vector<int>, Rational> best_subset_bruteforce(const GadgetInstance& inst, int k,
                                                             long long budget) {
  if (k < 1 || k > inst.graph.n) throw std::invalid_argument("subset size k out of range");
  if (inst.graph.n > 20) throw BudgetError("exhaustive subset search capped at 20 vertices");
  std::vector<int> best_set;
  Rational best_value = -1;
  for_each_subset(inst.graph.n, k, [&](const std::vector<int>& pick) {
    const Rational value = expected_max_subset(inst, pick, budget);
    if (value > best_value) {  // strict: lexicographically first maximizer wins
      best_value = value;
      best_set = pick;
    }
    return true;
  });
  return {best_set, best_value};
}

std::pair<std::vector<int>, int> max_independent_set_bruteforce(const Graph& g) {
  const auto adj = adjacency_masks(g);
  std::vector<int> best;
  for (int k = g.n; k >= 1; --k) {
    std::optional<std::vector<int>> found;
    for_each_subset(g.n, k, [&](const std::vector<int>& pick) {
      if (is_independent(adj, pick)) {
        found = pick;
        return false;
      }
      return true;
    });
    if (found) return {*found, k};
  }
  return {{}, 0};
}

std::optional<std::vector<int>> first_independent_set(const Graph& g, int k) {
  if (k < 1 || k > g.n) return std::nullopt;
  const auto adj = adjacency_masks(g);
  std::optional<std::vector<int>> found;
  for_each_subset(g.n, k, [&](const std::vector<int>& pick) {
    if (is_independent(adj, pick)) {
      found = pick;
      return false;
    }
    return true;
  });
  return found;
}

GadgetSeparationReport verify_separation(const GadgetInstance& inst) {
  if (inst.graph.n > 12) throw BudgetError("separation verification capped at 12 vertices");
  GadgetSeparationReport rep;
  rep.bounds = inst.bounds;
  const auto sstar = first_independent_set(inst.graph, inst.k);
  rep.has_independent_set = sstar.has_value();
  rep.sstar = sstar;

  if (!sstar) {
    // No size-k independent set: every subset must satisfy the upper bound.
    rep.worst_value = -1;
    for_each_subset(inst.graph.n, inst.k, [&](const std::vector<int>& pick) {
      const Rational value = expected_max_subset(inst, pick);
      if (value > rep.worst_value) {
        rep.worst_value = value;
        rep.worst_subset = pick;
      }
      return true;
    });
    rep.soundness_ok = rep.worst_value <= rep.bounds.soundness_coeff;
    if (!*rep.soundness_ok)
      rep.findings.push_back("a subset exceeds the soundness coefficient bound");
  } else {
    rep.sstar_value = expected_max_subset(inst, *sstar);
    rep.completeness_ok = rep.sstar_value >= rep.bounds.completeness_coeff;
    if (!*rep.completeness_ok)
      rep.findings.push_back("the independent set misses the completeness coefficient bound");
  }

  rep.separation_ok = rep.bounds.soundness_bound < rep.bounds.completeness_bound;
  if (!rep.separation_ok)
    rep.findings.push_back("value intervals fail to separate at the instance discount");
  return rep;
}

namespace {

// Policy-restricted two-step augmented chain for the waiting policy.
struct WaitingChain {
  std::vector<AugmentedState> states;
  std::map<std::string, int> index;
  SparseRows<Rational> rows;             // raw one-step probabilities
  std::vector<Rational> rewards;         // reward of the tuple's root
  std::vector<std::pair<int, Rational>> start;
};

// Distinct states revealed on the leave-action slice of the deepest block.
std::vector<int> revealed_set(const AugmentedState& xi, int A) {
  const auto& deep = xi.blocks[2];
  std::vector<int> out(deep.begin() + A, deep.begin() + 2 * A);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int waiting_action(const GadgetInstance& inst, const AugmentedState& xi,
                   const std::vector<int>& sstar_states) {
  const int A = inst.num_actions;
  const int root = xi.root();
  if (root == inst.s0) {
    // Leave once the reveal covers sstar: a superset is never worse because
    // the greedy walk maximizes over everything revealed. With |A| = k a
    // strict superset cannot occur and this is exact-set matching.
    const auto revealed = revealed_set(xi, A);
    return std::includes(revealed.begin(), revealed.end(), sstar_states.begin(),
                         sstar_states.end())
               ? 1
               : 0;
  }
  if (root == inst.s1) {
    // Greedy over branches: pick the action whose revealed first-action
    // successor carries the largest reward.
    int best_a = 0;
    Rational best = inst.mdp.rewards[xi.blocks[2][0]][0];
    for (int a = 1; a < A; ++a) {
      const Rational r = inst.mdp.rewards[xi.blocks[2][a * A]][0];
      if (r > best) {
        best = r;
        best_a = a;
      }
    }
    return best_a;
  }
  return 0;
}

WaitingChain build_waiting_chain(const GadgetInstance& inst, const std::vector<int>& sstar_states,
                                 long long budget) {
  WaitingChain chain;
  auto intern = [&](const AugmentedState& xi) {
    auto [it, fresh] = chain.index.emplace(encode_augmented(xi), chain.states.size());
    if (fresh) chain.states.push_back(xi);
    return it->second;
  };

  const auto lambda = initial_lookahead_distribution(inst.mdp, inst.s0, 2, budget);
  for (const auto& [xi, w] : lambda.support) chain.start.emplace_back(intern(xi), w);

  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    if (static_cast<long long>(chain.states.size()) > budget)
      throw BudgetError("waiting-policy chain exceeds budget");
    const AugmentedState xi = chain.states[i];
    const int a = waiting_action(inst, xi, sstar_states);
    std::vector<std::pair<int, Rational>> row;
    for (const auto& [nxt, p] : augmented_kernel(inst.mdp, xi, a, budget).support)
      row.emplace_back(intern(nxt), p);
    chain.rows.resize(chain.states.size());
    chain.rewards.resize(chain.states.size(), Rational(0));
    chain.rows[i] = std::move(row);
    chain.rewards[i] = inst.mdp.rewards[xi.root()][0];
  }
  chain.rows.resize(chain.states.size());
  chain.rewards.resize(chain.states.size(), Rational(0));
  return chain;
}

std::vector<Rational> chain_discounted_values(const WaitingChain& chain, const Rational& gamma) {
  SparseRows<Rational> scaled(chain.rows.size());
  for (std::size_t i = 0; i < chain.rows.size(); ++i)
    for (const auto& [j, p] : chain.rows[i]) scaled[i].emplace_back(j, gamma * p);
  return solve_markov_system(scaled, chain.rewards);
}

}  // namespace

WaitingPolicyCheck verify_waiting_policy(const GadgetInstance& inst, bool evaluate_chain) {
  const auto sstar = first_independent_set(inst.graph, inst.k);
  if (!sstar) throw std::invalid_argument("no independent set of the requested size");

  WaitingPolicyCheck check;
  check.sstar = *sstar;
  check.expected_max_sstar = expected_max_subset(inst, *sstar);
  const int n = inst.graph.n;
  const int A = inst.num_actions;

  // Each epoch reveals A iid uniform vertices. Enumerate all n^A draw tuples:
  // accept when the distinct set covers sstar, weighting the payoff by the
  // expected max over everything revealed (duplicates share one draw).
  const Rational tuple_prob =
      Rational(1) / Rational(int_pow(Integer(n), static_cast<unsigned long>(A)));
  Rational accept_prob = 0;
  Rational accept_payoff = 0;
  std::map<std::vector<int>, Rational> max_cache;
  std::vector<int> draw(static_cast<size_t>(A), 0);
  while (true) {
    std::vector<int> revealed(draw);
    std::sort(revealed.begin(), revealed.end());
    revealed.erase(std::unique(revealed.begin(), revealed.end()), revealed.end());
    if (std::includes(revealed.begin(), revealed.end(), sstar->begin(), sstar->end())) {
      auto it = max_cache.find(revealed);
      if (it == max_cache.end())
        it = max_cache.emplace(revealed, expected_max_subset(inst, revealed)).first;
      accept_prob += tuple_prob;
      accept_payoff += tuple_prob * it->second;
    }
    int pos = A - 1;
    while (pos >= 0 && draw[static_cast<size_t>(pos)] == n - 1) {
      draw[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++draw[static_cast<size_t>(pos)];
  }
  check.match_prob = accept_prob;

  const Rational& gamma = inst.gamma;
  const Rational g3 = rat_pow(gamma, 3);
  check.closed_form = g3 * accept_payoff / (1 - gamma * (1 - accept_prob));
  check.target = inst.bounds.completeness_bound;
  check.meets_target = check.closed_form >= check.target;

  if (evaluate_chain) {
    std::vector<int> sstar_states;
    for (int v : *sstar) sstar_states.push_back(inst.sv[v]);
    std::sort(sstar_states.begin(), sstar_states.end());
    const auto chain = build_waiting_chain(inst, sstar_states, 10000000);
    const auto values = chain_discounted_values(chain, gamma);
    check.chain_evaluated = true;
    check.chain_states = static_cast<long long>(chain.states.size());
    check.chain_value = 0;
    for (const auto& [i, w] : chain.start) check.chain_value += w * values[i];
    check.matches_closed_form = check.chain_value == check.closed_form;
    check.meets_target = check.meets_target && check.chain_value >= check.target;
  }
  return check;
}

Rational waiting_policy_renewal_residual(const GadgetInstance& inst) {
  const auto sstar = first_independent_set(inst.graph, inst.k);
  if (!sstar) throw std::invalid_argument("no independent set of the requested size");
  std::vector<int> sstar_states;
  for (int v : *sstar) sstar_states.push_back(inst.sv[v]);
  std::sort(sstar_states.begin(), sstar_states.end());

  const auto chain = build_waiting_chain(inst, sstar_states, 10000000);
  const Rational& gamma = inst.gamma;
  const auto values = chain_discounted_values(chain, gamma);
  Rational start_value = 0;
  for (const auto& [i, w] : chain.start) start_value += w * values[i];

  // Reset chain: follow the policy with probability gamma, otherwise redraw
  // the full look-ahead tuple at the root.
  SparseRows<Rational> reset(chain.rows.size());
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    std::map<int, Rational> row;
    for (const auto& [j, p] : chain.rows[i]) row[j] += gamma * p;
    for (const auto& [j, w] : chain.start) row[j] += (1 - gamma) * w;
    reset[i].assign(row.begin(), row.end());
  }
  const auto mu = stationary_distribution(reset);
  Rational gain = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) gain += mu[i] * chain.rewards[i];
  return abs_val(gain - (1 - gamma) * start_value);
}

}  // namespace mdplook
