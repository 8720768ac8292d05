#pragma once

// The two-variable quadratic
//   f(x,y) = a[x^2 + y^2 + (x+y)^2/(n-2)] - b x^2 - al(xy + y^2) - E[((n-2)b - al) x + (n-3) al y]
// (b = beta, al = alpha), its critical point and closed-form minimum E^2 Q.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "stabcert/rational.hpp"

namespace stabcert {

struct QuadMinInput {
  int n = 3;
  Rational a, alpha, beta;
  Rational E{1};
};

struct HessianConditions {
  bool fxx_positive = false;
  bool fyy_positive = false;
  bool discriminant_positive = false;

  bool all() const { return fxx_positive && fyy_positive && discriminant_positive; }
};

struct Hessian {
  Rational fxx, fyy, fxy;

  Rational determinant() const { return fxx * fyy - fxy * fxy; }
};

struct QuadMinResult {
  Rational x_star, y_star;
  Rational f_min_coefficient;
  Rational discriminant_D;
  bool hessian_ok = false;
};

namespace detail {
inline void require_dimension(int n) {
  if (n < 3) throw std::invalid_argument("dimension n must be >= 3");
}
}  // namespace detail

inline Rational discriminant_D(int n, const Rational& a, const Rational& alpha, const Rational& beta) {
  detail::require_dimension(n);
  const Rational m(n - 2);
  return Rational(4 * n) / m * a * a - 4 * (Rational(n - 1) / m * beta + alpha) * a + (4 * beta - alpha) * alpha;
}

inline Hessian hessian(int n, const Rational& a, const Rational& alpha, const Rational& beta) {
  detail::require_dimension(n);
  const Rational m(n - 2);
  const Rational diag = Rational(2 * (n - 1)) / m * a;
  return {diag - 2 * beta, diag - 2 * alpha, 2 * a / m - alpha};
}

inline HessianConditions hessian_conditions(int n, const Rational& a, const Rational& alpha, const Rational& beta) {
  const Hessian h = hessian(n, a, alpha, beta);
  return {h.fxx.sign() > 0, h.fyy.sign() > 0, discriminant_D(n, a, alpha, beta).sign() > 0};
}

inline Rational f_eval(const QuadMinInput& in, const Rational& x, const Rational& y) {
  detail::require_dimension(in.n);
  const Rational m(in.n - 2);
  const Rational s = x + y;
  return in.a * (x * x + y * y + s * s / m) - in.beta * x * x - in.alpha * (x * y + y * y) -
         in.E * ((m * in.beta - in.alpha) * x + Rational(in.n - 3) * in.alpha * y);
}

inline std::pair<Rational, Rational> gradient(const QuadMinInput& in, const Rational& x, const Rational& y) {
  detail::require_dimension(in.n);
  const Rational m(in.n - 2);
  const Rational s = 2 * in.a * (x + y) / m;
  const Rational fx = 2 * in.a * x + s - 2 * in.beta * x - in.alpha * y - in.E * (m * in.beta - in.alpha);
  const Rational fy = 2 * in.a * y + s - in.alpha * x - 2 * in.alpha * y - in.E * Rational(in.n - 3) * in.alpha;
  return {fx, fy};
}

// x* follows the closed form as usually displayed; the y* numerator is taken
// with the sign that makes the gradient vanish.
inline std::pair<Rational, Rational> critical_point(const QuadMinInput& in) {
  const auto cond = hessian_conditions(in.n, in.a, in.alpha, in.beta);
  const Rational D = discriminant_D(in.n, in.a, in.alpha, in.beta);
  if (D.is_zero()) throw std::domain_error("critical_point: zero discriminant");
  if (!cond.all()) throw std::domain_error("critical_point: Hessian conditions fail");
  const int n = in.n;
  const Rational& a = in.a;
  const Rational& al = in.alpha;
  const Rational& be = in.beta;
  const Rational xn = Rational(n - 1) * al * al - 2 * (Rational(n - 2) * be + 2 * a) * al + 2 * Rational(n - 1) * a * be;
  const Rational yn = al * al + (Rational(n - 4) * be - 2 * Rational(n - 2) * a) * al + 2 * a * be;
  return {in.E * xn / D, -(in.E * yn) / D};
}

/// Q with f_min = E^2 Q.
inline Rational f_min_closed_form(int n, const Rational& a, const Rational& alpha, const Rational& beta) {
  const Rational D = discriminant_D(n, a, alpha, beta);
  if (D.is_zero()) throw std::domain_error("f_min_closed_form: zero discriminant");
  if (!hessian_conditions(n, a, alpha, beta).all())
    throw std::domain_error("f_min_closed_form: Hessian conditions fail");
  const Rational m(n - 2);
  const Rational& al = alpha;
  const Rational& be = beta;
  const Rational num = m * al * al * al - (Rational(n * n - 5 * n + 8) * a + Rational(3 * n - 7) * be) * al * al +
                       (m * m * al - Rational(n - 1) * m * a) * be * be + 4 * m * a * al * be;
  return num / D;
}

inline QuadMinResult minimize(const QuadMinInput& in) {
  QuadMinResult r;
  r.discriminant_D = discriminant_D(in.n, in.a, in.alpha, in.beta);
  r.hessian_ok = hessian_conditions(in.n, in.a, in.alpha, in.beta).all();
  if (!r.hessian_ok) return r;
  std::tie(r.x_star, r.y_star) = critical_point(in);
  r.f_min_coefficient = f_min_closed_form(in.n, in.a, in.alpha, in.beta);
  return r;
}

// Default oracle grid: halfwidth 2, 401 x 401 points, tolerance 1e-4.
inline constexpr double kOracleHalfwidth = 2.0;
inline constexpr int kOracleSteps = 401;
inline constexpr double kOracleTolerance = 1e-4;

/// Brute-force minimum of f in double precision over a square grid centred at the critical point.
inline double f_min_bruteforce_oracle(const QuadMinInput& in, double halfwidth = kOracleHalfwidth,
                                      int steps = kOracleSteps) {
  const auto [xs, ys] = critical_point(in);
  const double n = in.n;
  const double a = in.a.to_double(), al = in.alpha.to_double(), be = in.beta.to_double(), E = in.E.to_double();
  auto f = [&](double x, double y) {
    const double s = x + y;
    return a * (x * x + y * y + s * s / (n - 2)) - be * x * x - al * (x * y + y * y) -
           E * (((n - 2) * be - al) * x + (n - 3) * al * y);
  };
  const double cx = xs.to_double(), cy = ys.to_double();
  const double h = steps > 1 ? 2 * halfwidth / (steps - 1) : 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i) {
    // offsets symmetric about the centre so odd grids hit it exactly
    const double x = cx + (i - (steps - 1) / 2.0) * h;
    for (int j = 0; j < steps; ++j) best = std::min(best, f(x, cy + (j - (steps - 1) / 2.0) * h));
  }
  return best;
}

}  // namespace stabcert
