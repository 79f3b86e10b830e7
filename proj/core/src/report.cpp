#include "mdplook/report.hpp"

#include <cstdint>
#include <cstdlib>

#include "mdplook/numeric.hpp"

namespace mdplook {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::optional<long long> env_budget_override() {
  const char* raw = std::getenv("MDPLOOK_BUDGET");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const long long value = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || value <= 0)
    throw ParseError("MDPLOOK_BUDGET must be a positive integer");
  return value;
}

long long effective_budget(long long default_budget) {
  const auto over = env_budget_override();
  return over ? *over : default_budget;
}

}  // namespace mdplook
