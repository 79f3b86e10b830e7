#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdplook {

// Exact arithmetic scalar. All gadget quantities use this type; the rest of
// the toolkit is templated over double / Rational.
using Rational = mpq_class;
using Integer = mpz_class;

enum class NumericMode { Float64, ExactRational };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Integer int_pow(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Rational rat_pow(const Rational& base, unsigned long exp) {
  Rational r = 1;
  for (unsigned long i = 0; i < exp; ++i) r *= base;
  return r;
}

// Parses "p", "-p" or "p/q". Used for exact-mode file fields.
inline Rational parse_fraction(const std::string& text) {
  if (text.empty()) throw ParseError("empty fraction literal");
  try {
    Rational q(text);
    // canonicalize() divides by the denominator, so reject zero first
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed fraction literal '" + text + "'");
  }
}

// Canonical lowest-terms rendering: "p" when the denominator is 1, else "p/q".
inline std::string format_fraction(const Rational& q) {
  return q.get_str();
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.get_d(); }

inline double abs_val(double x) { return std::fabs(x); }
inline Rational abs_val(const Rational& q) { return abs(q); }

// True when the rational is an integer of magnitude at most 2^53, i.e. exactly
// representable as a double without rounding surprises for reward arithmetic.
inline bool fits_double_exactly(const Rational& q) {
  static const Integer limit = int_pow(2, 53);
  return abs(q.get_num()) <= limit && q.get_den() <= limit;
}

// Smallest-exponent dyadic c/2^j with t < c/2^j < 1. Requires 0 < t < 1.
inline Rational dyadic_round_up(const Rational& t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("dyadic_round_up needs t in (0,1)");
  for (unsigned long j = 1;; ++j) {
    Integer two_j = int_pow(2, j);
    Integer c = (t.get_num() * two_j) / t.get_den() + 1;  // floor(t*2^j)+1 > t*2^j
    if (c < two_j) {
      Rational g(c, two_j);
      g.canonicalize();
      return g;
    }
  }
}

template <class T> struct numeric_traits;
template <> struct numeric_traits<double> {
  static constexpr NumericMode mode = NumericMode::Float64;
  static constexpr double row_sum_tol = 1e-12;
  static bool is_zero(double x) { return x == 0.0; }
};
template <> struct numeric_traits<Rational> {
  static constexpr NumericMode mode = NumericMode::ExactRational;
  static Rational row_sum_tol;  // exact mode: zero tolerance
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
};
inline Rational numeric_traits<Rational>::row_sum_tol = 0;

}  // namespace mdplook
