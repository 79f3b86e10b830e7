#pragma once

#include <optional>
#include <string>

namespace mdplook {

// FNV-1a 64-bit digest, hex encoded; used to key report inputs.
std::string fnv1a_hex(const std::string& data);

// MDPLOOK_BUDGET environment override for enumeration budgets.
std::optional<long long> env_budget_override();
long long effective_budget(long long default_budget);

}  // namespace mdplook
