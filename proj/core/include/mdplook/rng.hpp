#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mdplook {

// Deterministic random source. Draws go through uniform01() so sequences are
// reproducible across platforms (std::uniform_* distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), n >= 1.
  int below(int n) {
    return static_cast<int>(uniform01() * n) % n;
  }

  // Inverse-CDF draw; any residual mass from rounding goes to the last index.
  int categorical(const std::vector<double>& probs) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mdplook
