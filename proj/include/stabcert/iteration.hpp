#pragma once

// Iteration constants: admissible k, coefficient positivity, Caccioppoli
// constants, the critical exponent collapse, De Giorgi constants and the
// recursion simulator.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabcert/approx.hpp"
#include "stabcert/published.hpp"
#include "stabcert/rational.hpp"
#include "stabcert/surd.hpp"

namespace stabcert {

/// (n-2)/n
inline Rational sobolev_ratio(int n) { return Rational(n - 2, n); }

/// n(n-2)/(4(n-1))
inline Rational delta_c(int n) { return Rational(n * (n - 2), 4 * (n - 1)); }

struct KInterval {
  int n = 3;
  Rational delta;
  Rational radicand;  // delta (delta - (n-2)/n); negative means empty
  std::optional<ShiftedSurd> lower, upper;  // bounds on 2k

  bool nonempty() const { return radicand.sign() > 0; }

  /// Strict membership of 2k, decided exactly.
  bool contains(const Rational& two_k) const {
    if (!nonempty()) return false;
    return surd_compare(*lower, two_k) < 0 && surd_compare(*upper, two_k) > 0;
  }
};

inline KInterval k_interval(int n, const Rational& delta) {
  if (delta.sign() <= 0) throw std::domain_error("k_interval: delta must be positive");
  KInterval r{n, delta, delta * (delta - sobolev_ratio(n)), std::nullopt, std::nullopt};
  if (r.radicand.sign() >= 0) {
    const QuadSurd root = QuadSurd::sqrt_of(r.radicand);
    r.lower = ShiftedSurd(delta, -root);
    r.upper = ShiftedSurd(delta, root);
  }
  return r;
}

/// (2k + 1/n - 1/2 - 1/s) delta / k^2 - 2
inline Rational thm12_coefficient(int n, const Rational& delta, const Rational& k, const Rational& s) {
  if (k.sign() <= 0 || s.sign() <= 0) throw std::domain_error("thm12_coefficient: k and s must be positive");
  return (2 * k + Rational(1, n) - Rational(1, 2) - inverse(s)) * delta / (k * k) - 2;
}

/// The s -> infinity limit (2k + 1/n - 1/2) delta / k^2 - 2.
inline Rational thm12_limit_coefficient(int n, const Rational& delta, const Rational& k) {
  if (k.sign() <= 0) throw std::domain_error("thm12_limit_coefficient: k must be positive");
  return (2 * k + Rational(1, n) - Rational(1, 2)) * delta / (k * k) - 2;
}

struct CaccioppoliConstants {
  Rational branch1_coeff, branch1_numerator;
  Rational branch2_coeff, branch2_numerator;
  bool both_branches_positive = false;
  Rational C1;
  Rational p;  // 4k + 2
  std::optional<Rational> C2;  // exact when p/2 is an integer
  std::string C2_approx;       // always filled, 12 significant digits
};

inline CaccioppoliConstants caccioppoli_constants(int n, const Rational& delta, const Rational& k, const Rational& s,
                                                  const Rational& s1) {
  if (s1.sign() <= 0) throw std::domain_error("caccioppoli_constants: s1 must be positive");
  CaccioppoliConstants c;
  c.branch1_coeff = thm12_coefficient(n, delta, k, s);
  c.branch1_numerator = s + (2 * k + Rational(1, n) - Rational(1, 2) - inverse(s)) / (k * k);
  const Rational lin = k + Rational(1, 2 * n) - Rational(1, 4);
  c.branch2_coeff = lin * s1 * delta / (k * k * (s1 + 1)) - 1;
  c.branch2_numerator = s1 / (k * k) * lin;
  const bool pos1 = c.branch1_coeff.sign() > 0;
  const bool pos2 = c.branch2_coeff.sign() > 0;
  if (!pos1 && !pos2) throw std::domain_error("caccioppoli_constants: both coefficients nonpositive");
  c.both_branches_positive = pos1 && pos2;
  std::optional<Rational> best;
  if (pos1) best = c.branch1_numerator / c.branch1_coeff;
  if (pos2) {
    const Rational v = c.branch2_numerator / c.branch2_coeff;
    if (!best || v > *best) best = v;
  }
  c.C1 = *best;
  c.p = 4 * k + 2;
  const Rational base = c.p * c.p * c.C1 / 4;
  const Rational half_p = c.p / 2;
  if (half_p.is_integer()) c.C2 = pow(base, half_p.numerator().get_si());
  approx::PrecisionScope scope(approx::kMinWorkingDigits);
  c.C2_approx = approx::format(pow(approx::to_high(base), approx::to_high(half_p)));
  return c;
}

struct CorollaryCollapse {
  Rational delta_c;
  Rational radicand;  // delta_c (delta_c - (n-2)/n)
  std::optional<Rational> root;
  Rational expected_root;  // (n-2)^2 / (4(n-1))
  Rational boundary_two_k;  // (n-2)/2
  Rational boundary_p;      // 2 * boundary_two_k + 2

  bool collapses() const { return root && *root == expected_root; }
};

inline CorollaryCollapse corollary11_collapse(int n) {
  CorollaryCollapse c;
  c.delta_c = delta_c(n);
  c.radicand = c.delta_c * (c.delta_c - sobolev_ratio(n));
  c.root = exact_sqrt(c.radicand);
  c.expected_root = Rational((n - 2) * (n - 2), 4 * (n - 1));
  c.boundary_two_k = c.delta_c + (c.root ? *c.root : Rational(0));
  c.boundary_p = 2 * c.boundary_two_k + 2;
  return c;
}

struct CorollaryExponent {
  Rational delta;
  Rational delta_shifted;  // delta_c + (delta - delta_c)/2
  ShiftedSurd two_k;       // upper endpoint of the interval at delta_shifted
  ShiftedSurd p;           // 2 * two_k + 2
  bool p_exceeds_n = false;
  bool two_k_admissible = false;  // strictly inside the interval at delta
};

inline CorollaryExponent corollary11_exponent(int n, const Rational& delta) {
  const Rational dc = delta_c(n);
  if (delta <= dc) throw std::domain_error("corollary11_exponent: delta <= n(n-2)/(4(n-1))");
  CorollaryExponent r;
  r.delta = delta;
  r.delta_shifted = dc + (delta - dc) / 2;
  r.two_k = *k_interval(n, r.delta_shifted).upper;
  r.p = Rational(2) * r.two_k + Rational(2);
  r.p_exceeds_n = surd_compare(r.p, Rational(n)) > 0;
  const KInterval iv = k_interval(n, delta);
  r.two_k_admissible = iv.nonempty() && surd_compare(*iv.lower, r.two_k) < 0 && surd_compare(r.two_k, *iv.upper) < 0;
  return r;
}

inline Rational delta1_of(int n) { return max(published::quoted(n).delta0, delta_c(n)); }

/// C = 2^e, e = max{(3n+2)/(n-2), 2n/(n-2) - 2/q + 1}
struct PowerOfTwo {
  Rational exponent;
  bool operator==(const PowerOfTwo&) const = default;
};

struct DeGiorgiConstants {
  int n = 3;
  Rational delta, q;
  double C_MS = 1, R = 1e6;
  PowerOfTwo C;
  int C_branch = 0;  // 1 or 2: which exponent attains the max
  Rational R_exponent_1;  // (2n-4)/n
  Rational R_exponent_2;  // 2(n-2)/(nq) - 4/n
  Rational hypothesis_exponent;  // (n-2)/q - 2
  std::string C0;  // 12 significant digits
  std::string bracket;  // the R-free bracket that enters epsilon1
};

inline void require_q_window(int n, const Rational& q, const Rational& delta) {
  if (!(sobolev_ratio(n) < q && q < delta)) throw std::domain_error("q must lie in ((n-2)/n, delta)");
}

inline PowerOfTwo degiorgi_C(int n, const Rational& q, int* branch = nullptr) {
  const Rational e1(3 * n + 2, n - 2);
  const Rational e2 = Rational(2 * n, n - 2) - 2 / q + 1;
  if (branch) *branch = e1 >= e2 ? 1 : 2;
  return {max(e1, e2)};
}

namespace detail {
inline approx::HighFloat degiorgi_terms(int n, const Rational& delta, const Rational& q, approx::HighFloat* second) {
  using approx::HighFloat;
  const Rational gap = q - sobolev_ratio(n);
  const HighFloat first = approx::to_high(2 * q / gap + 1) * 128;
  *second = approx::to_high(q * q * q / ((delta - q) * gap)) * pow(HighFloat(2), approx::to_high(2 / q));
  return first;
}
}  // namespace detail

inline DeGiorgiConstants degiorgi_constants(int n, const Rational& delta, const Rational& q, double C_MS, double R) {
  using approx::HighFloat;
  require_q_window(n, q, delta);
  if (!(R > 1)) throw std::domain_error("degiorgi_constants: R must exceed 1");
  if (!(C_MS > 0)) throw std::domain_error("degiorgi_constants: C_MS must be positive");
  DeGiorgiConstants d;
  d.n = n;
  d.delta = delta;
  d.q = q;
  d.C_MS = C_MS;
  d.R = R;
  d.C = degiorgi_C(n, q, &d.C_branch);
  d.R_exponent_1 = Rational(2 * n - 4, n);
  d.R_exponent_2 = Rational(2 * (n - 2), n) / q - Rational(4, n);
  d.hypothesis_exponent = Rational(n - 2) / q - 2;
  approx::PrecisionScope scope(approx::kMinWorkingDigits);
  HighFloat t2;
  const HighFloat t1 = detail::degiorgi_terms(n, delta, q, &t2);
  const HighFloat r(R);
  const HighFloat c0 = HighFloat(C_MS) * (t1 / pow(r, approx::to_high(d.R_exponent_1)) +
                                          t2 / pow(r, approx::to_high(d.R_exponent_2)));
  d.C0 = approx::format(c0);
  d.bracket = approx::format(HighFloat(t1 + t2));
  return d;
}

inline constexpr double kEpsilon1Safety = 0.5;

/// eps1 C^{n^2/2} C_MS {bracket}^{n/2} < 1, returned at half the critical value.
inline approx::HighFloat epsilon1_threshold_high(int n, const Rational& delta, const Rational& q, double C_MS) {
  using approx::HighFloat;
  require_q_window(n, q, delta);
  if (!(C_MS > 0)) throw std::domain_error("epsilon1_threshold: C_MS must be positive");
  HighFloat t2;
  const HighFloat t1 = detail::degiorgi_terms(n, delta, q, &t2);
  const HighFloat C_pow = pow(HighFloat(2), approx::to_high(degiorgi_C(n, q).exponent * Rational(n * n, 2)));
  const HighFloat crit = 1 / (C_pow * HighFloat(C_MS) * pow(HighFloat(t1 + t2), HighFloat(n) / 2));
  return crit * HighFloat(kEpsilon1Safety);
}

inline std::string epsilon1_threshold(int n, const Rational& delta, const Rational& q, double C_MS) {
  approx::PrecisionScope scope(approx::kMinWorkingDigits);
  return approx::format(epsilon1_threshold_high(n, delta, q, C_MS));
}

struct RecursionStep {
  std::size_t odd_index = 1;  // 2j + 1
  double log_S = 0;           // simulated, log domain
  double log_bound = 0;       // closed form
  double direct_S = 0;        // direct domain; inf/0 when out of range
  bool dominated = true;
};

struct RecursionResult {
  std::vector<RecursionStep> steps;
  double log_product = 0;  // log(C0^{n/2} C^{n^2/2} S1)
  bool bound_respected = true;
  bool tends_to_zero = false;
  bool log_direct_agree = true;
  Rational exponent_sum_check;  // sum_{j<l} m^j - (m^l - 1)/(m - 1), must be 0
};

inline constexpr double kRecursionTolerance = 1e-9;

/// Iterates S_{2j+1} = C0^m (C^m)^{2j-1} S_{2j-1}^m, m = n/(n-2), from S_1
/// and compares with (C0^{n/2} C^{n^2/2} S1)^{m^j}.
inline RecursionResult recursion_simulate(double S1, double C0, double C, int n, std::size_t steps) {
  if (!(S1 > 0 && C0 > 0 && C > 0)) throw std::domain_error("recursion_simulate: inputs must be positive");
  if (n < 3) throw std::domain_error("recursion_simulate: n must be >= 3");
  const double m = static_cast<double>(n) / (n - 2);
  const double lC0 = std::log(C0), lC = std::log(C), lS1 = std::log(S1);
  RecursionResult out;
  out.log_product = n / 2.0 * lC0 + n * n / 2.0 * lC + lS1;
  double u = lS1, direct = S1, mj = 1;
  for (std::size_t j = 0; j <= steps; ++j) {
    if (j > 0) {
      const double e = 2.0 * static_cast<double>(j) - 1;
      u = m * lC0 + e * m * lC + m * u;
      direct = std::pow(C0, m) * std::pow(std::pow(C, m), e) * std::pow(direct, m);
      mj *= m;
    }
    RecursionStep s;
    s.odd_index = 2 * j + 1;
    s.log_S = u;
    s.log_bound = mj * out.log_product;
    s.direct_S = direct;
    s.dominated = s.log_S <= s.log_bound + kRecursionTolerance * std::max(1.0, std::abs(s.log_bound));
    if (std::isfinite(direct) && direct > std::numeric_limits<double>::min()) {
      const double lu = std::exp(u);
      if (std::abs(direct - lu) > kRecursionTolerance * 1e3 * std::max(direct, lu)) out.log_direct_agree = false;
    }
    out.bound_respected = out.bound_respected && s.dominated;
    out.steps.push_back(s);
  }
  const auto& last = out.steps.back().log_S;
  out.tends_to_zero = out.log_product < 0 && last < out.steps.front().log_S &&
                      out.steps.back().log_bound < std::log(std::numeric_limits<double>::min());
  const Rational mr(n, n - 2);
  Rational sum(0), p(1);
  for (std::size_t j = 0; j < steps; ++j) {
    sum += p;
    p *= mr;
  }
  out.exponent_sum_check = sum - (p - 1) / (mr - 1);
  return out;
}

}  // namespace stabcert
