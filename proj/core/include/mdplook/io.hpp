#pragma once

#include <string>
#include <variant>

#include "mdplook/mdp.hpp"

namespace mdplook {

using MdpVariant = std::variant<MdpF, MdpQ>;

// Textual MDP format: object with "states", "actions",
// "transitions"[action][from][to], "rewards"[state][action], optional
// "gamma", optional "initial_state", optional "mode" ("float" | "rational").
// Probabilities and rewards are numbers or fraction strings "p/q".
// Unknown fields are rejected. Exact mode additionally rejects non-integer
// numeric literals, since those cannot be recovered exactly.
MdpVariant parse_mdp_text(const std::string& text);
MdpVariant load_mdp(const std::string& path);

std::string mdp_to_text(const MdpF& mdp);
std::string mdp_to_text(const MdpQ& mdp);
void save_mdp(const MdpF& mdp, const std::string& path);
void save_mdp(const MdpQ& mdp, const std::string& path);

inline NumericMode mode_of(const MdpVariant& v) {
  return std::holds_alternative<MdpF>(v) ? NumericMode::Float64 : NumericMode::ExactRational;
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mdplook
