#pragma once

// High-precision floating mirrors. Nothing in this header participates in a
// pass/fail decision on an exact constraint; values computed here are reported
// as approximate fields (with a digit count) or used as advisory oracles.

#include <boost/multiprecision/mpfr.hpp>

#include <iomanip>
#include <sstream>
#include <string>

#include "stabcert/rational.hpp"
#include "stabcert/surd.hpp"

namespace stabcert::approx {

using HighFloat = boost::multiprecision::mpfr_float;

inline constexpr unsigned kMinWorkingDigits = 50;
inline constexpr unsigned kReportedDigits = 12;

/// Sets the working precision (decimal digits) for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits10) : saved_(HighFloat::default_precision()) {
    HighFloat::default_precision(digits10 < kMinWorkingDigits ? kMinWorkingDigits : digits10);
  }
  ~PrecisionScope() { HighFloat::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline HighFloat to_high(const Rational& r) {
  HighFloat num(r.numerator().get_str());
  HighFloat den(r.denominator().get_str());
  return num / den;
}

inline HighFloat to_high(const QuadSurd& x) { return to_high(x.coeff()) * sqrt(to_high(x.radicand())); }

inline HighFloat pi() {
  HighFloat p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

/// Scientific notation with `digits` significant digits, e.g. "1.23456789012e+05".
inline std::string format(const HighFloat& value, unsigned digits = kReportedDigits) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(static_cast<int>(digits) - 1) << value;
  return os.str();
}

/// Volume of the unit ball in R^n via omega_n = (2 pi / n) omega_{n-2}.
inline HighFloat unit_ball_volume(int n) {
  HighFloat omega = (n % 2 == 0) ? HighFloat(1) : HighFloat(2);
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) omega *= 2 * pi() / k;
  return omega;
}

/// Area of the unit sphere S^{n-1} in R^n.
inline HighFloat unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace stabcert::approx
