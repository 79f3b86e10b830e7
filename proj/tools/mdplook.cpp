// mdplook: batch front end for the look-ahead planning toolkit.
// Prints a JSON run report on stdout; the "body" object is byte-reproducible
// for identical inputs, flags, and seed, while "timing" is not.
// Exit codes: 0 success, 1 validation/usage failure, 2 budget or precision refusal.

#include <chrono>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdplook/augment.hpp"
#include "mdplook/decide.hpp"
#include "mdplook/gadget.hpp"
#include "mdplook/io.hpp"
#include "mdplook/mdp.hpp"
#include "mdplook/onestep.hpp"
#include "mdplook/planners.hpp"
#include "mdplook/report.hpp"
#include "mdplook/reset.hpp"

using json = nlohmann::ordered_json;
using namespace mdplook;

namespace {

std::chrono::steady_clock::time_point g_start;

void print_report(json body, const std::string& output_path) {
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - g_start);
  json report;
  report["body"] = std::move(body);
  report["timing"] = {{"elapsed_ms", elapsed.count()}};
  const std::string text = report.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!output_path.empty()) write_text_file(output_path, text);
}

int emit_error(const std::string& command, const std::string& kind, const std::string& detail,
               int code, const std::string& output_path) {
  json body;
  body["command"] = command;
  body["error"] = {{"kind", kind}, {"detail", detail}};
  print_report(std::move(body), output_path);
  return code;
}

std::string mode_name(const MdpVariant& v) {
  return mode_of(v) == NumericMode::Float64 ? "float64" : "rational";
}

// Planning runs in float64; exact inputs are converted when representable.
MdpF planning_mdp(const MdpVariant& v, std::vector<std::string>& notes) {
  if (std::holds_alternative<MdpF>(v)) return std::get<MdpF>(v);
  notes.push_back("exact-mode input converted to float64 for planning");
  return mdp_to_float(std::get<MdpQ>(v));
}

json violations_json(const ValidationReport& rep) {
  json arr = json::array();
  for (const auto& v : rep.violations)
    arr.push_back({{"kind", v.kind}, {"where", v.where}, {"detail", v.detail}});
  return arr;
}

json values_json(const std::vector<std::string>& names, const std::vector<double>& v) {
  json out = json::object();
  for (std::size_t s = 0; s < v.size(); ++s) out[names[s]] = v[s];
  return out;
}

json notes_json(const std::vector<std::string>& notes) {
  json arr = json::array();
  for (const auto& n : notes) arr.push_back(n);
  return arr;
}

struct CommonOpts {
  std::string input;
  std::string output;
};

int run_validate(const CommonOpts& common) {
  const std::string text = read_text_file(common.input);
  json body;
  body["command"] = "validate";
  body["inputs_digest"] = fnv1a_hex(text);
  const MdpVariant var = parse_mdp_text(text);
  body["mode"] = mode_name(var);
  const ValidationReport rep =
      std::visit([](const auto& mdp) { return validate_mdp(mdp); }, var);
  body["results"] = {{"pass", rep.pass},
                     {"states", std::visit([](const auto& m) { return m.num_states(); }, var)},
                     {"actions", std::visit([](const auto& m) { return m.num_actions(); }, var)},
                     {"violations", violations_json(rep)}};
  print_report(std::move(body), common.output);
  return rep.pass ? 0 : 1;
}

struct AugmentOpts {
  int lookahead = 1;
  std::vector<std::string> roots;
  std::string emit;
  long long budget = kDefaultAugmentBudget;
};

template <class T>
json run_augment_typed(const Mdp<T>& mdp, const AugmentOpts& opts, long long budget,
                       const std::string& emit_path) {
  std::vector<int> roots;
  if (opts.roots.empty()) {
    for (int s = 0; s < mdp.num_states(); ++s) roots.push_back(s);
  } else {
    for (const auto& name : opts.roots) {
      const int idx = mdp.state_index(name);
      if (idx < 0) throw std::invalid_argument("unknown root state: " + name);
      roots.push_back(idx);
    }
  }
  const auto aug = build_augmented_mdp(mdp, roots, opts.lookahead, budget);
  const auto rep = validate_mdp(aug.mdp);
  if (!emit_path.empty()) save_mdp(aug.mdp, emit_path);
  json results = {{"augmented_states", aug.mdp.num_states()},
                  {"actions", aug.mdp.num_actions()},
                  {"validation_pass", rep.pass}};
  if (!emit_path.empty()) results["emitted"] = emit_path;
  return results;
}

int run_augment(const CommonOpts& common, const AugmentOpts& opts) {
  const std::string text = read_text_file(common.input);
  const MdpVariant var = parse_mdp_text(text);
  const long long budget = env_budget_override().value_or(opts.budget);
  json body;
  body["command"] = "augment";
  body["inputs_digest"] = fnv1a_hex(text);
  body["mode"] = mode_name(var);
  body["flags"] = {{"lookahead", opts.lookahead},
                   {"roots", opts.roots.empty() ? json("all") : json(opts.roots)},
                   {"budget", budget}};
  body["results"] = std::visit(
      [&](const auto& mdp) { return run_augment_typed(mdp, opts, budget, opts.emit); }, var);
  print_report(std::move(body), common.output);
  return 0;
}

struct PlanOpts {
  int lookahead = 0;
  std::string criterion = "discounted";
  std::string method = "sorted-vi";
  double gamma = -1;  // <0 means "use the file's gamma"
  double epsilon = 1e-9;
  bool has_theta = false;
  double theta = 0;
  std::string state;
  int threads = 1;
  long long budget = kDefaultAugmentBudget;
  std::string csv;
};

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<double>& v) {
  std::string text = "state,value\n";
  char buf[64];
  for (std::size_t s = 0; s < v.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", v[s]);
    text += names[s] + "," + buf + "\n";
  }
  write_text_file(path, text);
}

// Classical discounted LP: min (1-gamma) sum w_s v_s subject to
// v(s) >= r(s,a) + gamma sum_t P_a(t|s) v(t); no constraint generation needed
// because the constraint family is polynomial at lookahead 0.
std::vector<double> solve_zero_lookahead_lp(const MdpF& mdp, double gamma) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<double> objective(S, (1 - gamma) / S);
  std::vector<LpConstraint> rows;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      LpConstraint c;
      c.coef.assign(S, 0.0);
      c.coef[s] += 1.0;
      for (int t = 0; t < S; ++t) c.coef[t] -= gamma * mdp.kernel[a][s][t];
      c.sense = LpSense::Ge;
      c.rhs = mdp.rewards[s][a];
      rows.push_back(std::move(c));
    }
  const LpResult lp = simplex_solve(objective, rows);
  if (lp.status != LpStatus::Optimal) throw ConvergenceError("discounted LP solve failed");
  return lp.x;
}

int run_plan(const CommonOpts& common, const PlanOpts& opts) {
  const std::string text = read_text_file(common.input);
  const MdpVariant var = parse_mdp_text(text);
  const long long budget = env_budget_override().value_or(opts.budget);
  std::vector<std::string> notes;
  const MdpF mdp = planning_mdp(var, notes);

  const bool discounted = opts.criterion == "discounted";
  double gamma = opts.gamma;
  if (discounted) {
    if (gamma < 0 && mdp.gamma) gamma = *mdp.gamma;
    if (!(gamma > 0 && gamma < 1))
      throw std::invalid_argument("discounted planning needs --gamma in (0,1) or a file gamma");
  }
  if (opts.lookahead >= 2 && opts.method != "augmented-brute")
    throw std::invalid_argument("lookahead >= 2 requires --method augmented-brute");

  std::string method = opts.method;
  json results;
  json residuals;

  if (discounted) {
    std::vector<double> values;
    if (opts.lookahead == 0 && method == "sorted-vi") {
      const auto solve = value_iteration_discounted(mdp, gamma, opts.epsilon, opts.threads);
      values = solve.v;
      json policy = json::object();
      for (int s = 0; s < mdp.num_states(); ++s)
        policy[mdp.states[s]] = mdp.actions[solve.policy.choice[s]];
      results = {{"values", values_json(mdp.states, values)}, {"policy", policy}};
      residuals = {{"bellman", solve.residual}, {"iterations", solve.iterations}};
    } else if (opts.lookahead == 0 && method == "cg-lp") {
      values = solve_zero_lookahead_lp(mdp, gamma);
      results = {{"values", values_json(mdp.states, values)}};
      residuals = json::object();
      notes.push_back("lookahead 0 solves the classical linear program directly");
    } else if (opts.lookahead == 1 && method == "sorted-vi") {
      const auto solve = solve_onestep_discounted(mdp, gamma, opts.epsilon, opts.threads);
      values = solve.v;
      results = {{"values", values_json(mdp.states, values)}};
      residuals = {{"bellman", solve.residual}, {"iterations", solve.iterations}};
    } else if (opts.lookahead == 1 && method == "cg-lp") {
      const auto solve = solve_onestep_discounted_cg(mdp, gamma);
      values = solve.v;
      results = {{"values", values_json(mdp.states, values)},
                 {"converged", solve.converged},
                 {"cuts", solve.cuts},
                 {"oracle_calls", solve.oracle_calls}};
      residuals = {{"final_violation", solve.final_violation}};
      if (!solve.converged) notes.push_back("constraint generation hit its round cap");
    } else if (method == "augmented-brute") {
      std::vector<int> roots(mdp.num_states());
      for (int s = 0; s < mdp.num_states(); ++s) roots[s] = s;
      const auto full = build_augmented_mdp(mdp, roots, opts.lookahead, budget);
      const auto solve = value_iteration_discounted(full.mdp, gamma, opts.epsilon, opts.threads);
      values.resize(mdp.num_states());
      for (int s = 0; s < mdp.num_states(); ++s)
        values[s] = lookahead_start_value(mdp, s, opts.lookahead, full, solve.v, budget);
      results = {{"values", values_json(mdp.states, values)},
                 {"augmented_states", full.mdp.num_states()}};
      residuals = {{"bellman", solve.residual}, {"iterations", solve.iterations}};
    } else {
      throw std::invalid_argument("unsupported method for this lookahead");
    }
    if (opts.has_theta) {
      int s0 = mdp.initial_state.value_or(-1);
      if (!opts.state.empty()) s0 = mdp.state_index(opts.state);
      if (s0 < 0) throw std::invalid_argument("--theta needs --state or a file initial_state");
      const double value = values[s0];
      results["decision"] = {{"state", mdp.states[s0]},
                             {"theta", opts.theta},
                             {"yes", value >= opts.theta},
                             {"margin", value - opts.theta}};
    }
    if (!opts.csv.empty()) write_csv(opts.csv, mdp.states, values);
  } else if (opts.criterion == "average") {
    if (opts.lookahead == 0 && method == "cg-lp") {
      method = "sorted-vi";
      notes.push_back(
          "cg-lp is not defined for the average criterion at lookahead 0; "
          "fell back to relative value iteration");
    }
    double gain = 0;
    if (opts.lookahead == 0) {
      const auto solve = average_reward_solve(mdp, opts.epsilon, 1000000, 0, opts.threads);
      gain = solve.gb.gain;
      results = {{"gain", gain}, {"bias", values_json(mdp.states, solve.gb.bias)}};
      residuals = {{"optimality", solve.residual}, {"iterations", solve.iterations}};
    } else if (opts.lookahead == 1 && method == "cg-lp") {
      const auto solve = solve_onestep_average_cg(mdp);
      gain = solve.gb.gain;
      results = {{"gain", gain},
                 {"bias", values_json(mdp.states, solve.gb.bias)},
                 {"converged", solve.converged},
                 {"cuts", solve.cuts}};
      residuals = json::object();
      if (solve.box_hit) notes.push_back("bias box constraint is binding; result suspect");
    } else if (opts.lookahead == 1) {
      const auto solve = solve_onestep_average(mdp, opts.epsilon, 1000000, 0, opts.threads);
      gain = solve.gb.gain;
      results = {{"gain", gain}, {"bias", values_json(mdp.states, solve.gb.bias)}};
      residuals = {{"optimality", solve.residual}, {"iterations", solve.iterations}};
    } else if (method == "augmented-brute") {
      std::vector<int> roots(mdp.num_states());
      for (int s = 0; s < mdp.num_states(); ++s) roots[s] = s;
      const auto full = build_augmented_mdp(mdp, roots, opts.lookahead, budget);
      const auto solve = average_reward_solve(full.mdp, opts.epsilon, 1000000, 0, opts.threads);
      gain = solve.gb.gain;
      results = {{"gain", gain}, {"augmented_states", full.mdp.num_states()}};
      residuals = {{"optimality", solve.residual}, {"iterations", solve.iterations}};
    } else {
      throw std::invalid_argument("unsupported method for this lookahead");
    }
    if (opts.has_theta)
      results["decision"] = {{"theta", opts.theta},
                             {"yes", gain >= opts.theta},
                             {"margin", gain - opts.theta}};
  } else {
    throw std::invalid_argument("criterion must be discounted or average");
  }

  json body;
  body["command"] = "plan";
  body["inputs_digest"] = fnv1a_hex(text);
  body["mode"] = "float64";
  body["flags"] = {{"lookahead", opts.lookahead}, {"criterion", opts.criterion},
                   {"method", method},           {"gamma", discounted ? json(gamma) : json()},
                   {"epsilon", opts.epsilon},    {"threads", opts.threads},
                   {"budget", budget}};
  body["results"] = std::move(results);
  body["residuals"] = std::move(residuals);
  body["notes"] = notes_json(notes);
  print_report(std::move(body), common.output);
  return 0;
}

struct OracleOpts {
  int trials = 20;
  std::uint64_t seed = 1;
  long long budget = kDefaultAugmentBudget;
};

int run_oracle(const CommonOpts& common, const OracleOpts& opts) {
  const std::string text = read_text_file(common.input);
  const MdpVariant var = parse_mdp_text(text);
  const long long budget = env_budget_override().value_or(opts.budget);

  json body;
  body["command"] = "oracle";
  body["inputs_digest"] = fnv1a_hex(text);
  body["mode"] = mode_name(var);
  body["flags"] = {{"trials", opts.trials}, {"seed", opts.seed}, {"budget", budget}};

  Rng rng(opts.seed);
  if (std::holds_alternative<MdpF>(var)) {
    const MdpF& mdp = std::get<MdpF>(var);
    double max_diff = 0;
    for (int t = 0; t < opts.trials; ++t)
      for (int s = 0; s < mdp.num_states(); ++s) {
        ScoreMatrix<double> u(mdp.num_states(), std::vector<double>(mdp.num_actions()));
        for (auto& row : u)
          for (auto& x : row) x = rng.uniform(0.0, 1.0);
        const double a = expected_max_sorted(mdp, s, u);
        const double b = expected_max_bruteforce(mdp, s, u, budget);
        max_diff = std::max(max_diff, std::fabs(a - b));
      }
    body["results"] = {{"comparisons", opts.trials * std::get<MdpF>(var).num_states()},
                       {"max_abs_diff", max_diff},
                       {"pass", max_diff <= 1e-10},
                       {"verdict", max_diff <= 1e-10 ? "sorted vs brute max-abs-diff <= 1e-10"
                                                     : "sorted vs brute disagree"}};
    print_report(std::move(body), common.output);
    return max_diff <= 1e-10 ? 0 : 1;
  }

  const MdpQ& mdp = std::get<MdpQ>(var);
  bool all_equal = true;
  for (int t = 0; t < opts.trials; ++t)
    for (int s = 0; s < mdp.num_states(); ++s) {
      ScoreMatrix<Rational> u(mdp.num_states(), std::vector<Rational>(mdp.num_actions()));
      for (auto& row : u)
        for (auto& x : row) x = Rational(rng.below(10000)) / Rational(10000);
      const Rational a = expected_max_sorted(mdp, s, u);
      const Rational b = expected_max_bruteforce(mdp, s, u, budget);
      if (a != b) all_equal = false;
    }
  body["results"] = {{"comparisons", opts.trials * mdp.num_states()},
                     {"exact_equal", all_equal},
                     {"pass", all_equal},
                     {"verdict", all_equal ? "sorted equals brute exactly"
                                           : "sorted vs brute disagree"}};
  print_report(std::move(body), common.output);
  return all_equal ? 0 : 1;
}

struct GadgetOpts {
  std::string graph;
  int k = 1;
  bool verify = false;
  std::string emit;
};

json subset_json(const std::vector<int>& subset) {
  json arr = json::array();
  for (int v : subset) arr.push_back(v + 1);  // vertices are 1-based outside
  return arr;
}

int run_gadget(const GadgetOpts& opts, const std::string& output) {
  const std::string text = read_text_file(opts.graph);
  json body;
  body["command"] = "gadget";
  body["inputs_digest"] = fnv1a_hex(text);
  body["mode"] = "rational";
  body["flags"] = {{"k", opts.k}, {"verify", opts.verify}};

  const Graph g = parse_graph_text(text);
  const auto reg = check_regular(g, 3);
  if (!reg.regular) {
    body["error"] = {{"kind", "validation"},
                     {"detail", "graph is not 3-regular (vertex " +
                                    std::to_string(reg.offending_vertex + 1) + ")"}};
    print_report(std::move(body), output);
    return 1;
  }

  const GadgetInstance inst = build_gadget_mdp(g, opts.k);
  const GadgetThresholds& th = inst.bounds;
  body["results"] = {
      {"n", th.n},
      {"m", th.m},
      {"k", th.k},
      {"actions", inst.num_actions},
      {"mu", format_fraction(inst.mu)},
      {"gamma", format_fraction(th.gamma)},
      {"thresholds",
       {{"soundness_coeff", format_fraction(th.soundness_coeff)},
        {"completeness_coeff", format_fraction(th.completeness_coeff)},
        {"gamma_min_exact", format_fraction(th.gamma_min_exact)},
        {"gamma_min_stated", format_fraction(th.gamma_min_stated)},
        {"soundness_bound", format_fraction(th.soundness_bound)},
        {"completeness_bound", format_fraction(th.completeness_bound)},
        {"separated", th.soundness_bound < th.completeness_bound}}},
      {"bonus_scale_max", format_fraction(inst.qb_scale_max)},
      {"action_count_note", inst.action_count_note}};

  if (opts.verify) {
    const auto rep = verify_separation(inst);
    json ver = {{"has_independent_set", rep.has_independent_set},
                {"separation_ok", rep.separation_ok}};
    if (rep.sstar) ver["independent_set"] = subset_json(*rep.sstar);
    if (rep.soundness_ok) {
      ver["soundness_ok"] = *rep.soundness_ok;
      ver["worst_subset"] = subset_json(rep.worst_subset);
      ver["worst_value"] = format_fraction(rep.worst_value);
    }
    if (rep.completeness_ok) {
      ver["completeness_ok"] = *rep.completeness_ok;
      ver["independent_set_value"] = format_fraction(rep.sstar_value);
    }
    json findings = json::array();
    for (const auto& f : rep.findings) findings.push_back(f);
    ver["findings"] = findings;
    body["results"]["verification"] = ver;
  }
  if (!opts.emit.empty()) {
    save_mdp(inst.mdp, opts.emit);
    body["results"]["emitted"] = opts.emit;
  }
  print_report(std::move(body), output);
  return 0;
}

struct ResetOpts {
  double gamma = 0.5;
  std::string state;
  std::string emit;
};

template <class T>
json run_reset_typed(const Mdp<T>& mdp, const T& gamma, const std::string& state,
                     const std::string& emit_path) {
  const int s0 = mdp.state_index(state);
  if (s0 < 0) throw std::invalid_argument("unknown state: " + state);
  Mdp<T> out = reset_transform(mdp, gamma, s0);
  const auto rep = validate_mdp(out);
  json results = {{"reset_state", state},
                  {"validation_pass", rep.pass},
                  {"mdp", nlohmann::ordered_json::parse(mdp_to_text(out))}};
  if (!emit_path.empty()) {
    save_mdp(out, emit_path);
    results["emitted"] = emit_path;
  }
  return results;
}

int run_reset(const CommonOpts& common, const ResetOpts& opts) {
  const std::string text = read_text_file(common.input);
  const MdpVariant var = parse_mdp_text(text);
  if (!(opts.gamma > 0 && opts.gamma < 1))
    throw std::invalid_argument("--gamma must lie in (0,1)");
  json body;
  body["command"] = "reset";
  body["inputs_digest"] = fnv1a_hex(text);
  body["mode"] = mode_name(var);
  body["flags"] = {{"gamma", opts.gamma}, {"state", opts.state}};
  if (std::holds_alternative<MdpF>(var)) {
    body["results"] = run_reset_typed(std::get<MdpF>(var), opts.gamma, opts.state, opts.emit);
  } else {
    // Exact mode keeps the reset weights exact only for dyadic gamma.
    const Rational g = parse_fraction(format_fraction(Rational(opts.gamma)));
    body["results"] = run_reset_typed(std::get<MdpQ>(var), g, opts.state, opts.emit);
  }
  print_report(std::move(body), common.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_start = std::chrono::steady_clock::now();
  CLI::App app{"planning toolkit for tabular MDPs with transition look-ahead"};
  app.require_subcommand(1);

  CommonOpts common;
  AugmentOpts augment_opts;
  PlanOpts plan_opts;
  OracleOpts oracle_opts;
  GadgetOpts gadget_opts;
  ResetOpts reset_opts;

  auto* validate = app.add_subcommand("validate", "check an MDP file");
  validate->add_option("--input", common.input)->required();
  validate->add_option("--output", common.output);

  auto* augment = app.add_subcommand("augment", "build the look-ahead augmented MDP");
  augment->add_option("--input", common.input)->required();
  augment->add_option("--lookahead", augment_opts.lookahead)->check(CLI::Range(0, kMaxLookahead));
  augment->add_option("--roots", augment_opts.roots)->delimiter(',');
  augment->add_option("--emit", augment_opts.emit);
  augment->add_option("--budget", augment_opts.budget);
  augment->add_option("--output", common.output);

  auto* plan = app.add_subcommand("plan", "solve for optimal look-ahead values");
  plan->add_option("--input", common.input)->required();
  plan->add_option("--lookahead", plan_opts.lookahead)->check(CLI::Range(0, kMaxLookahead));
  plan->add_option("--criterion", plan_opts.criterion)
      ->check(CLI::IsMember({"discounted", "average"}));
  plan->add_option("--method", plan_opts.method)
      ->check(CLI::IsMember({"sorted-vi", "cg-lp", "augmented-brute"}));
  plan->add_option("--gamma", plan_opts.gamma);
  plan->add_option("--epsilon", plan_opts.epsilon);
  auto* theta_opt = plan->add_option("--theta", plan_opts.theta);
  plan->add_option("--state", plan_opts.state);
  plan->add_option("--threads", plan_opts.threads)->check(CLI::Range(1, 64));
  plan->add_option("--budget", plan_opts.budget);
  plan->add_option("--csv", plan_opts.csv);
  plan->add_option("--output", common.output);

  auto* oracle = app.add_subcommand("oracle", "cross-check the sorting trick against brute force");
  oracle->add_option("--input", common.input)->required();
  oracle->add_option("--trials", oracle_opts.trials)->check(CLI::Range(1, 100000));
  oracle->add_option("--seed", oracle_opts.seed);
  oracle->add_option("--budget", oracle_opts.budget);
  oracle->add_option("--output", common.output);

  auto* gadget = app.add_subcommand("gadget", "compile a 3-regular graph into a hardness instance");
  gadget->add_option("--graph", gadget_opts.graph)->required();
  gadget->add_option("--k", gadget_opts.k)->required();
  gadget->add_flag("--verify", gadget_opts.verify);
  gadget->add_option("--emit", gadget_opts.emit);
  gadget->add_option("--output", common.output);

  auto* reset = app.add_subcommand("reset", "mix transitions with a reset to a start state");
  reset->add_option("--input", common.input)->required();
  reset->add_option("--gamma", reset_opts.gamma)->required();
  reset->add_option("--state", reset_opts.state)->required();
  reset->add_option("--emit", reset_opts.emit);
  reset->add_option("--output", common.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  plan_opts.has_theta = theta_opt->count() > 0;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (validate->parsed()) return run_validate(common);
    if (augment->parsed()) return run_augment(common, augment_opts);
    if (plan->parsed()) return run_plan(common, plan_opts);
    if (oracle->parsed()) return run_oracle(common, oracle_opts);
    if (gadget->parsed()) return run_gadget(gadget_opts, common.output);
    if (reset->parsed()) return run_reset(common, reset_opts);
  } catch (const BudgetError& e) {
    return emit_error(command, "budget", e.what(), 2, common.output);
  } catch (const PrecisionError& e) {
    return emit_error(command, "precision", e.what(), 2, common.output);
  } catch (const ParseError& e) {
    return emit_error(command, "parse", e.what(), 1, common.output);
  } catch (const ConvergenceError& e) {
    return emit_error(command, "convergence", e.what(), 1, common.output);
  } catch (const std::exception& e) {
    return emit_error(command, "error", e.what(), 1, common.output);
  }
  return 0;
}
