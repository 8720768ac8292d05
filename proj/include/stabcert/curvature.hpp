#pragma once

// F(n,b,alpha,beta,t), its endpoint minimum epsilon, and the pointwise
// curvature inequality checked by exact random sampling.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stabcert/constraint_report.hpp"
#include "stabcert/published.hpp"
#include "stabcert/quadratic_min.hpp"
#include "stabcert/rational.hpp"
#include "stabcert/sampling.hpp"

namespace stabcert {

struct ParamSet {
  int n = 3;
  Rational a, b, alpha, beta;

  Rational delta0() const { return a / b; }
  Rational q() const { return b / beta; }

  static ParamSet from_row(int n, Rational a, Rational b, Rational alpha, Rational beta) {
    if (n < 3) throw std::invalid_argument("ParamSet: n must be >= 3");
    if (b.sign() <= 0 || alpha.sign() <= 0 || beta.sign() <= 0)
      throw std::invalid_argument("ParamSet: b, alpha, beta must be positive");
    return {n, std::move(a), std::move(b), std::move(alpha), std::move(beta)};
  }

  static ParamSet from_delta0(int n, const Rational& delta0, Rational b, Rational alpha, Rational beta) {
    Rational a = b * delta0;
    return from_row(n, std::move(a), std::move(b), std::move(alpha), std::move(beta));
  }

  static ParamSet published_row(int n) {
    const auto r = published::row(n);
    return from_row(r.n, r.a, r.b, r.alpha, r.beta);
  }

  QuadMinInput quad_input(const Rational& E = Rational(1)) const { return {n, a, alpha, beta, E}; }

  bool operator==(const ParamSet&) const = default;
};

enum class MaxBranch { first, second, both };  // (n-2)beta - alpha, (n-3)alpha

inline std::string_view to_string(MaxBranch b) {
  switch (b) {
    case MaxBranch::first: return "(n-2)beta-alpha";
    case MaxBranch::second: return "(n-3)alpha";
    case MaxBranch::both: return "both";
  }
  return "?";
}

struct SlopeTerm {
  Rational value;
  MaxBranch branch;
};

/// (n^2-4)/4 b - (n beta + (n-1) alpha) - max{(n-2)beta - alpha, (n-3)alpha}
inline SlopeTerm F_t1_terms(const ParamSet& p) {
  const Rational first = Rational(p.n - 2) * p.beta - p.alpha;
  const Rational second = Rational(p.n - 3) * p.alpha;
  const MaxBranch branch = first > second ? MaxBranch::first : (second > first ? MaxBranch::second : MaxBranch::both);
  const Rational mx = max(first, second);
  return {Rational(p.n * p.n - 4, 4) * p.b - (Rational(p.n) * p.beta + Rational(p.n - 1) * p.alpha) - mx, branch};
}

inline Rational F_constant(const ParamSet& p) {
  return Rational(2 * (p.n - 1)) * p.beta + Rational(2 * (p.n - 2)) * p.alpha - p.b * Rational(p.n * (p.n - 2), 2);
}

inline Rational F_eval(const ParamSet& p, const Rational& t) {
  if (t.sign() < 0 || t > Rational(1)) throw std::domain_error("F_eval: t outside [0,1]");
  const Rational Q = f_min_closed_form(p.n, p.a, p.alpha, p.beta);
  return F_constant(p) + F_t1_terms(p).value * t + (Rational(1) - t) * Q;
}

struct EpsilonResult {
  Rational F_at_0, F_at_1, epsilon;
  MaxBranch max_branch = MaxBranch::first;
};

inline EpsilonResult epsilon_of(const ParamSet& p) {
  EpsilonResult r;
  r.F_at_0 = F_eval(p, Rational(0));
  r.F_at_1 = F_eval(p, Rational(1));
  r.epsilon = min(r.F_at_0, r.F_at_1);
  r.max_branch = F_t1_terms(p).branch;
  return r;
}

inline bool linearity_check(const ParamSet& p, std::size_t k_samples, std::uint64_t seed = 1) {
  const Rational F0 = F_eval(p, Rational(0));
  const Rational F1 = F_eval(p, Rational(1));
  Rng rng = chunk_rng(seed, 0);
  for (std::size_t i = 0; i < k_samples; ++i) {
    const Rational t = random_unit_rational(rng);
    if (F_eval(p, t) != (Rational(1) - t) * F0 + t * F1) return false;
  }
  return true;
}

/// aS + BiRic_12 + E[((n-2)beta - alpha) l1 + (n-3) alpha l2] - E^2 Q
/// with BiRic_12 = -beta l1^2 - alpha(l1 l2 + l2^2).
inline Rational lemma32_margin(const ParamSet& p, const Rational& Q, const std::vector<Rational>& lambda,
                               const Rational& E) {
  Rational S(0);
  for (const auto& l : lambda) S += l * l;
  const Rational& l1 = lambda[0];
  const Rational& l2 = lambda[1];
  const Rational biric = -p.beta * l1 * l1 - p.alpha * (l1 * l2 + l2 * l2);
  const Rational linear = E * ((Rational(p.n - 2) * p.beta - p.alpha) * l1 + Rational(p.n - 3) * p.alpha * l2);
  return p.a * S + biric + linear - E * E * Q;
}

/// Trace-free vector whose first two entries sit at the critical point for
/// the linear-term scale -E; the margin vanishes there.
inline std::vector<Rational> lemma32_tight_sample(const ParamSet& p, const Rational& E) {
  const auto [x, y] = critical_point(p.quad_input(-E));
  std::vector<Rational> lambda(static_cast<std::size_t>(p.n), -(x + y) / Rational(p.n - 2));
  lambda[0] = x;
  lambda[1] = y;
  return lambda;
}

namespace detail {
struct Lemma32Chunk {
  std::size_t violations = 0;
  std::optional<Rational> min_margin;
  std::string witness;
};

inline std::string describe_sample(const std::vector<Rational>& lambda, const Rational& E) {
  std::ostringstream os;
  os << "lambda=(";
  for (std::size_t i = 0; i < lambda.size(); ++i) os << (i ? "," : "") << lambda[i];
  os << ") E=" << E;
  return os.str();
}
}  // namespace detail

/// Every 8th sample is a tight one (zero margin); the rest are uniform random
/// rational vectors projected to trace zero.
inline ConstraintReport lemma32_sampling_check(const ParamSet& p, std::size_t sample_count, std::uint64_t seed,
                                               unsigned threads = default_threads()) {
  const Rational Q = f_min_closed_form(p.n, p.a, p.alpha, p.beta);
  const auto n = static_cast<std::size_t>(p.n);
  auto run = [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    detail::Lemma32Chunk out;
    Rng rng = chunk_rng(seed, chunk);
    std::vector<Rational> lambda(n);
    for (std::size_t i = begin; i < end; ++i) {
      const Rational E = (i % 16 == 0) ? Rational(0) : random_rational(rng);
      if (i % 8 == 1) {
        lambda = lemma32_tight_sample(p, E);
      } else {
        Rational sum(0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
          lambda[j] = random_rational(rng);
          sum += lambda[j];
        }
        lambda[n - 1] = -sum;
      }
      const Rational m = lemma32_margin(p, Q, lambda, E);
      if (!out.min_margin || m < *out.min_margin) out.min_margin = m;
      if (m.sign() < 0 && out.violations++ == 0) out.witness = detail::describe_sample(lambda, E);
    }
    return out;
  };
  const auto chunks = parallel_chunks<detail::Lemma32Chunk>(sample_count, threads, run);
  std::size_t violations = 0;
  std::optional<Rational> min_margin;
  std::string witness;
  for (const auto& c : chunks) {
    if (c.violations && witness.empty()) witness = c.witness;
    violations += c.violations;
    if (c.min_margin && (!min_margin || *c.min_margin < *min_margin)) min_margin = c.min_margin;
  }
  ConstraintReport report;
  ConstraintEntry e;
  e.name = "lemma32_sampling";
  e.kind = CheckKind::sampled;
  e.value = std::to_string(violations) + " violations in " + std::to_string(sample_count) + " samples";
  e.margin = min_margin;
  e.status = violations == 0 ? CheckStatus::pass : CheckStatus::fail;
  e.detail = violations == 0 ? "minimum margin over samples" : "first violation: " + witness;
  report.add(std::move(e));
  return report;
}

}  // namespace stabcert
