#pragma once

#include <gmpxx.h>

#include <string>

namespace smallforms {

// Exact arbitrary-precision rational scalar.  All exact arithmetic in the
// library goes through this alias so the underlying bignum package is an
// implementation detail of this header.  Caution: the two-argument
// constructor Rational(p, q) does NOT reduce to lowest terms, and exact
// equality compares numerator/denominator pairs, so call .canonicalize()
// after constructing from a non-coprime pair (parse_rational and all
// arithmetic results are always canonical).
using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q", integers ("-7"), decimals ("0.25"), and scientific notation
// ("2.5e-3") into an exact rational.  Throws Error(parse_error) on malformed
// input (including zero denominators).
Rational parse_rational(const std::string& text);

// Canonical textual form: "p/q" with coprime p, q and q > 0, or plain "p"
// when the value is an integer.  parse_rational(format_rational(v)) == v.
std::string format_rational(const Rational& v);

inline double to_double(const Rational& v) { return v.get_d(); }

inline bool is_integer(const Rational& v) {
  return mpz_cmp_ui(v.get_den().get_mpz_t(), 1) == 0;
}

// The bignum package constructs from long but not long long; heights are
// long long throughout, so funnel them through this helper.
inline Rational rational_from_ll(long long v) {
  return Rational(static_cast<long>(v));
}

// Floor of an exact rational as an exact integer.
Integer rational_floor(const Rational& v);

// Nearest integer with ties (fractional part exactly 1/2) rounded to the
// even neighbour, matching the default floating-point rounding mode.
Integer nearest_integer(const Rational& v);

// base^exp with integer exponent; exp < 0 requires base != 0.
Rational rational_pow(const Rational& base, long exp);

inline Rational rational_abs(const Rational& v) {
  Rational out;
  mpq_abs(out.get_mpq_t(), v.get_mpq_t());
  return out;
}

// Fractional part in [0, 1): v - floor(v).
Rational fractional_part(const Rational& v);

}  // namespace smallforms
