#pragma once

// Coefficient chain for the warped bubble: q, spectral coefficient, the
// mean-curvature quadratic form, Young parameter L, gamma0, barrier x0/y0
// and the growth constants.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabcert/approx.hpp"
#include "stabcert/constraint_report.hpp"
#include "stabcert/curvature.hpp"
#include "stabcert/rational.hpp"
#include "stabcert/sampling.hpp"
#include "stabcert/surd.hpp"

namespace stabcert {

inline Rational spectral_coeff(const Rational& q, const Rational& alpha, const Rational& beta) {
  if (q >= Rational(4)) throw std::domain_error("spectral_coeff: q >= 4");
  return Rational(4) / (Rational(4) - q) * beta / alpha;
}

inline ConstraintReport spectral_coeff_check(const ParamSet& p) {
  ConstraintReport r;
  const Rational q = p.q();
  r.add_margin("q_positive", q);
  r.add_margin("q_below_4", Rational(4) - q);
  if (q >= Rational(4)) {
    r.add({"spectral_coeff_bound", CheckKind::exact, "", std::nullopt, CheckStatus::fail, "q >= 4"});
    return r;
  }
  if (p.n == 3) {
    r.add_not_applicable("spectral_coeff_bound", "n = 3 has no (n-2)/(n-3) bound");
    return r;
  }
  const Rational c = spectral_coeff(q, p.alpha, p.beta);
  r.add_margin("spectral_coeff_bound", Rational(p.n - 2, p.n - 3) - c, true,
               "(n-2)/(n-3) - 4/(4-q) beta/alpha, coefficient " + c.str());
  return r;
}

/// (n-1)beta - (n-2)alpha, positive exactly when alpha/beta < (n-1)/(n-2).
inline Rational mean_curv_precondition(int n, const Rational& alpha, const Rational& beta) {
  return Rational(n - 1) * beta - Rational(n - 2) * alpha;
}

inline Rational mean_curv_coeff(int n, const Rational& alpha, const Rational& beta) {
  if (beta.sign() <= 0) throw std::domain_error("mean_curv_coeff: beta must be positive");
  const Rational pre = mean_curv_precondition(n, alpha, beta);
  if (pre.sign() <= 0) throw std::domain_error("mean_curv_coeff: alpha/beta >= (n-1)/(n-2)");
  return (4 * beta * beta - Rational(n - 2) * alpha * alpha) / (4 * beta * pre);
}

/// A mu^2 + B H mu + C H^2 for the quadratic form in (mu1, Hbar).
struct QuadForm {
  Rational A, B, C;

  Rational eval(const Rational& mu, const Rational& H) const { return A * mu * mu + B * H * mu + C * H * H; }
  Rational vertex(const Rational& H) const { return -B * H / (2 * A); }
};

inline QuadForm mean_curv_quadform(int n, const Rational& alpha, const Rational& beta) {
  const Rational r = alpha / beta;
  return {Rational(n - 1, n - 2) - r, Rational(n - 3) * r / Rational(n - 1),
          (Rational(1) + r * Rational(n - 2, n - 1)) / Rational(n - 1)};
}

inline ConstraintReport quadform_lower_bound_check(int n, const Rational& alpha, const Rational& beta,
                                                   std::size_t sample_count, std::uint64_t seed) {
  const Rational mc = mean_curv_coeff(n, alpha, beta);
  const QuadForm f = mean_curv_quadform(n, alpha, beta);
  Rng rng = chunk_rng(seed, 0);
  std::size_t violations = 0, vertex_mismatch = 0;
  std::optional<Rational> min_margin;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const Rational mu = random_rational(rng);
    const Rational H = random_rational(rng);
    const Rational m = f.eval(mu, H) - mc * H * H;
    if (!min_margin || m < *min_margin) min_margin = m;
    if (m.sign() < 0) ++violations;
    if (f.eval(f.vertex(H), H) != mc * H * H) ++vertex_mismatch;
  }
  ConstraintReport r;
  r.add({"quadform_lower_bound", CheckKind::sampled,
         std::to_string(violations) + " violations in " + std::to_string(sample_count) + " samples", min_margin,
         violations == 0 ? CheckStatus::pass : CheckStatus::fail, "minimum of form - coeff*H^2"});
  r.add({"quadform_vertex_tight", CheckKind::sampled,
         std::to_string(vertex_mismatch) + " mismatches in " + std::to_string(sample_count) + " samples",
         std::nullopt, vertex_mismatch == 0 ? CheckStatus::pass : CheckStatus::fail,
         "vertex value equals coeff*H^2"});
  return r;
}

inline Rational half_minus_inv_q(const Rational& q) { return abs(Rational(1, 2) - inverse(q)); }

/// mean_curv_coeff + 1/q - 1 - L |1/2 - 1/q|
inline Rational hbar2_coefficient(int n, const Rational& q, const Rational& alpha, const Rational& beta,
                                  const Rational& L) {
  return mean_curv_coeff(n, alpha, beta) + inverse(q) - 1 - L * half_minus_inv_q(q);
}

inline Rational L_max_numerator(int n, const Rational& q, const Rational& alpha, const Rational& beta) {
  return mean_curv_coeff(n, alpha, beta) + inverse(q) - 1;
}

/// Largest L keeping the Hbar^2 coefficient nonnegative; nullopt when q = 2
/// (every L works).
inline std::optional<Rational> L_max(int n, const Rational& q, const Rational& alpha, const Rational& beta) {
  const Rational num = L_max_numerator(n, q, alpha, beta);
  if (num.sign() <= 0) throw std::domain_error("L_max: nonpositive numerator");
  const Rational den = half_minus_inv_q(q);
  if (den.is_zero()) return std::nullopt;
  return num / den;
}

struct Gamma0 {
  Rational bare;
  Rational with_ratio;
};

inline Gamma0 gamma0(const Rational& q, const Rational& L, const Rational& alpha, const Rational& beta) {
  if (L.sign() <= 0) throw std::domain_error("gamma0: L must be positive");
  const Rational bare = inverse(q) - half_minus_inv_q(q) / L;
  return {bare, bare * beta / alpha};
}

struct BarrierSurds {
  QuadSurd x0, y0;
};

inline BarrierSurds x0_y0(const Rational& alpha, const Rational& beta, const Rational& epsilon,
                          const Rational& gamma0) {
  if (epsilon.sign() <= 0) throw std::domain_error("x0_y0: epsilon must be positive");
  if (gamma0.sign() <= 0) throw std::domain_error("x0_y0: gamma0 must be positive");
  // 1/(2 sqrt2 beta) sqrt(alpha eps gamma0) = 1/(2 beta) sqrt(alpha eps gamma0 / 2)
  return {QuadSurd::sqrt_of(epsilon / (2 * alpha * gamma0)),
          QuadSurd(inverse(2 * beta), alpha * epsilon * gamma0 / 2)};
}

/// 2(beta/alpha) x0 y0 == eps/(2 alpha)
inline bool barrier_identity_product(const BarrierSurds& s, const Rational& alpha, const Rational& beta,
                                     const Rational& epsilon) {
  const auto prod = surd_product_identity(s.x0, s.y0);
  const auto* r = std::get_if<Rational>(&prod);
  return r && 2 * beta / alpha * *r == epsilon / (2 * alpha);
}

/// 2(beta/alpha) y0/x0 == gamma0
inline bool barrier_identity_ratio(const BarrierSurds& s, const Rational& alpha, const Rational& beta,
                                   const Rational& gamma0) {
  const auto ratio = (s.y0 / s.x0).as_rational();
  return ratio && 2 * beta / alpha * *ratio == gamma0;
}

struct BarrierOdeResult {
  std::size_t samples = 0;
  std::size_t breaches = 0;
  std::string max_relative_residual;  // residual / (1 + eta^2)
  std::string midpoint_residual;
};

inline constexpr double kBarrierTolerance = 1e-9;

/// eta(t) = -x0 tan(y0 t - pi/2) checked against -eta' = x0 y0 + (y0/x0) eta^2
/// at stratified random points of (0, pi/y0), in mpfr at >= 50 digits.
inline BarrierOdeResult barrier_ode_check(const QuadSurd& x0s, const QuadSurd& y0s, std::size_t sample_count,
                                          std::uint64_t seed, unsigned digits = approx::kMinWorkingDigits) {
  using approx::HighFloat;
  if (x0s.sign() <= 0 || y0s.sign() <= 0) throw std::domain_error("barrier_ode_check: x0, y0 must be positive");
  approx::PrecisionScope scope(digits);
  const HighFloat x0 = approx::to_high(x0s), y0 = approx::to_high(y0s);
  const HighFloat pi = approx::pi();
  const HighFloat T = pi / y0;
  const HighFloat half = pi / 2;
  const HighFloat rel_step = pow(HighFloat(10), -HighFloat(HighFloat::default_precision()) * 2 / 5);
  auto eta = [&](const HighFloat& t) { return -x0 * tan(y0 * t - half); };
  auto residual = [&](const HighFloat& t) {
    // step shrinks with the distance to the nearer pole
    HighFloat d = T - t;
    if (t < d) d = t;
    const HighFloat h = rel_step * d;
    const HighFloat deriv = (eta(t + h) - eta(t - h)) / (2 * h);
    const HighFloat e = eta(t);
    return HighFloat(abs(deriv + x0 * y0 + y0 / x0 * e * e) / (1 + e * e));
  };
  BarrierOdeResult out;
  out.samples = sample_count;
  HighFloat worst = 0;
  Rng rng = chunk_rng(seed, 0);
  const HighFloat margin = T * HighFloat(1e-6);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const HighFloat u = (HighFloat(i) + uniform_unit(rng)) / sample_count;
    const HighFloat t = margin + u * (T - 2 * margin);
    const HighFloat r = residual(t);
    if (r > worst) worst = r;
    if (r > kBarrierTolerance) ++out.breaches;
  }
  out.max_relative_residual = approx::format(worst);
  out.midpoint_residual = approx::format(residual(T / 2));
  return out;
}

struct GrowthConstants {
  std::string area_const;
  std::string volume_const;
  unsigned digits = approx::kReportedDigits;
};

inline GrowthConstants growth_constants(int n, const Rational& alpha, const Rational& epsilon, const QuadSurd& y0,
                                        unsigned working_digits = approx::kMinWorkingDigits) {
  using approx::HighFloat;
  if (epsilon.sign() <= 0 || y0.sign() <= 0) throw std::domain_error("growth_constants: nonpositive input");
  approx::PrecisionScope scope(working_digits);
  const HighFloat base = approx::to_high(Rational(n - 2) * alpha / epsilon);
  const HighFloat area = pow(base, HighFloat(n - 1) / 2) * approx::unit_sphere_area(n);
  const HighFloat vol = pow(base, HighFloat(n) / 2) * approx::unit_ball_volume(n) *
                        pow(2 * exp(3 * approx::pi() / approx::to_high(y0)), n);
  return {approx::format(area), approx::format(vol)};
}

}  // namespace stabcert
