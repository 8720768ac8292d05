#pragma once

// Continued-fraction rounding of doubles/rationals to bounded denominators.

#include <stdexcept>
#include <vector>

#include "stabcert/rational.hpp"

namespace stabcert {

/// Partial quotients of x (finite, since x is rational).
inline std::vector<BigInt> continued_fraction(const Rational& x) {
  std::vector<BigInt> terms;
  BigInt p = x.numerator();
  BigInt q = x.denominator();
  while (q != 0) {
    BigInt t;
    mpz_fdiv_q(t.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    terms.push_back(t);
    BigInt r = p - t * q;
    p = q;
    q = r;
  }
  return terms;
}

/// Closest rational to x with denominator <= max_den (convergents plus the
/// last admissible semiconvergent).
inline Rational best_rational_approximation(const Rational& x, const BigInt& max_den) {
  if (max_den < 1) throw std::invalid_argument("best_rational_approximation: max_den < 1");
  if (x.denominator() <= max_den) return x;
  const auto terms = continued_fraction(x);
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (const auto& a : terms) {
    const BigInt p2 = a * p1 + p0;
    const BigInt q2 = a * q1 + q0;
    if (q2 > max_den) {
      BigInt k = (max_den - q0) / q1;
      const Rational semi(k * p1 + p0, k * q1 + q0);
      const Rational conv(p1, q1);
      return abs(semi - x) < abs(conv - x) ? semi : conv;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return Rational(p1, q1);
}

inline Rational best_rational_approximation(double x, const BigInt& max_den) {
  return best_rational_approximation(Rational::from_double(x), max_den);
}

/// The rational with smallest denominator in the open interval (lo, hi).
inline Rational simplest_rational_between(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw std::invalid_argument("simplest_rational_between: empty interval");
  if (lo.sign() < 0 && hi.sign() > 0) return Rational(0);
  if (hi.sign() <= 0) return -simplest_rational_between(-hi, -lo);
  const BigInt fl = floor(lo);
  const Rational base(fl, BigInt(1));
  const Rational next(fl + 1, BigInt(1));
  if (next < hi) return next;
  // no integer inside: lo = base + 1/y with y in (1/(hi - base), 1/(lo - base))
  const Rational y_lo = inverse(hi - base);
  if (lo == base) return base + inverse(Rational(floor(y_lo) + 1, BigInt(1)));
  return base + inverse(simplest_rational_between(y_lo, inverse(lo - base)));
}

}  // namespace stabcert
