#pragma once

#include <gmpxx.h>

#include <string>

namespace xicorr {

/// Arbitrary-precision integers and rationals (GMP). mpq_class keeps values
/// canonical after arithmetic; call canonicalize() after constructing from a
/// raw numerator/denominator pair, or use make_rational().
using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline double to_double(const Rational& q) { return q.get_d(); }

BigInt binomial(unsigned n, unsigned k);

}  // namespace xicorr
