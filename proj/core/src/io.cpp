#include "mdplook/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mdplook {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

double number_as_double(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(parse_fraction(v.get<std::string>()));
  fail(where, "expected number or fraction string");
}

Rational number_as_rational(const json& v, const std::string& where) {
  if (v.is_string()) return parse_fraction(v.get<std::string>());
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<std::int64_t>()));
  if (v.is_number()) fail(where, "non-exact numeric literal in rational mode; use \"p/q\"");
  fail(where, "expected integer or fraction string");
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) fail(where, "expected array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

template <class T, class Conv>
Mdp<T> build_mdp(const json& doc, Conv conv) {
  Mdp<T> mdp;
  mdp.states = string_list(doc.at("states"), "states");
  mdp.actions = string_list(doc.at("actions"), "actions");

  const auto& trans = doc.at("transitions");
  if (!trans.is_array()) fail("transitions", "expected array indexed [action][from][to]");
  for (std::size_t a = 0; a < trans.size(); ++a) {
    std::vector<std::vector<T>> mat;
    if (!trans[a].is_array()) fail("transitions[" + std::to_string(a) + "]", "expected array of rows");
    for (std::size_t s = 0; s < trans[a].size(); ++s) {
      std::vector<T> row;
      const auto& jrow = trans[a][s];
      if (!jrow.is_array()) fail("transitions", "expected row array");
      for (std::size_t t = 0; t < jrow.size(); ++t)
        row.push_back(conv(jrow[t], "transitions[" + std::to_string(a) + "][" + std::to_string(s) +
                                        "][" + std::to_string(t) + "]"));
      mat.push_back(std::move(row));
    }
    mdp.kernel.push_back(std::move(mat));
  }

  const auto& rew = doc.at("rewards");
  if (!rew.is_array()) fail("rewards", "expected array indexed [state][action]");
  for (std::size_t s = 0; s < rew.size(); ++s) {
    std::vector<T> row;
    if (!rew[s].is_array()) fail("rewards", "expected row array");
    for (std::size_t a = 0; a < rew[s].size(); ++a)
      row.push_back(conv(rew[s][a], "rewards[" + std::to_string(s) + "][" + std::to_string(a) + "]"));
    mdp.rewards.push_back(std::move(row));
  }

  if (doc.contains("gamma")) mdp.gamma = conv(doc.at("gamma"), "gamma");
  if (doc.contains("initial_state")) {
    if (!doc.at("initial_state").is_string()) fail("initial_state", "expected state name string");
    const std::string name = doc.at("initial_state").get<std::string>();
    int idx = mdp.state_index(name);
    if (idx < 0) fail("initial_state", "unknown state '" + name + "'");
    mdp.initial_state = idx;
  }
  mdp.recompute_r_max();
  return mdp;
}

}  // namespace

MdpVariant parse_mdp_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top level: expected object");

  static const std::set<std::string> known = {"states",  "actions",       "transitions",
                                              "rewards", "gamma",         "initial_state",
                                              "mode"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) fail(key, "unknown field");
  for (const char* req : {"states", "actions", "transitions", "rewards"})
    if (!doc.contains(req)) fail(req, "missing required field");

  std::string mode = "float";
  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) fail("mode", "expected \"float\" or \"rational\"");
    mode = doc.at("mode").get<std::string>();
  }
  if (mode == "float")
    return build_mdp<double>(doc, number_as_double);
  if (mode == "rational")
    return build_mdp<Rational>(doc, number_as_rational);
  fail("mode", "expected \"float\" or \"rational\"");
}

MdpVariant load_mdp(const std::string& path) {
  try {
    return parse_mdp_text(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace {

json scalar_json(double x) { return json(x); }
json scalar_json(const Rational& q) { return json(format_fraction(q)); }

template <class T>
std::string render(const Mdp<T>& mdp, const char* mode) {
  json doc = json::object();
  doc["states"] = mdp.states;
  doc["actions"] = mdp.actions;
  json trans = json::array();
  for (const auto& mat : mdp.kernel) {
    json jmat = json::array();
    for (const auto& row : mat) {
      json jrow = json::array();
      for (const auto& p : row) jrow.push_back(scalar_json(p));
      jmat.push_back(std::move(jrow));
    }
    trans.push_back(std::move(jmat));
  }
  doc["transitions"] = std::move(trans);
  json rew = json::array();
  for (const auto& row : mdp.rewards) {
    json jrow = json::array();
    for (const auto& r : row) jrow.push_back(scalar_json(r));
    rew.push_back(std::move(jrow));
  }
  doc["rewards"] = std::move(rew);
  if (mdp.gamma) doc["gamma"] = scalar_json(*mdp.gamma);
  if (mdp.initial_state) doc["initial_state"] = mdp.states[*mdp.initial_state];
  doc["mode"] = mode;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string mdp_to_text(const MdpF& mdp) { return render(mdp, "float"); }
std::string mdp_to_text(const MdpQ& mdp) { return render(mdp, "rational"); }

void save_mdp(const MdpF& mdp, const std::string& path) { write_text_file(path, mdp_to_text(mdp)); }
void save_mdp(const MdpQ& mdp, const std::string& path) { write_text_file(path, mdp_to_text(mdp)); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

}  // namespace mdplook
