#pragma once

// Feasibility margins for a parameter row, and the float-search /
// rationalize / recertify loop over rows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stabcert/bubble.hpp"
#include "stabcert/constraint_report.hpp"
#include "stabcert/curvature.hpp"
#include "stabcert/published.hpp"
#include "stabcert/rational.hpp"
#include "stabcert/rounding.hpp"
#include "stabcert/sampling.hpp"

namespace stabcert {

enum class Margin : std::size_t {
  b_positive,
  alpha_positive,
  beta_positive,
  hessian_fxx,
  hessian_fyy,
  discriminant_D,
  epsilon_positive,
  mean_curv_precondition,
  q_below_4,
  spectral_coeff_bound,
  L_max_numerator,
  gamma0_bare_positive,
  hbar2_coefficient_at_L,
  count
};

inline constexpr std::size_t kMarginCount = static_cast<std::size_t>(Margin::count);

inline constexpr std::array<const char*, kMarginCount> kMarginNames{
    "b_positive",      "alpha_positive",   "beta_positive",        "hessian_fxx",
    "hessian_fyy",     "discriminant_D",   "epsilon_positive",     "mean_curv_precondition",
    "q_below_4",       "spectral_coeff_bound", "L_max_numerator", "gamma0_bare_positive",
    "hbar2_coefficient_at_L"};

struct FeasibilityOptions {
  std::optional<Rational> L_cap;    // L = min(L_max, L_cap)
  std::optional<Rational> L_fixed;  // overrides L_max entirely
};

struct FeasibilityDetail {
  ConstraintReport report;
  std::optional<Rational> epsilon;
  std::optional<Rational> L;
  std::optional<Rational> gamma0_bare;
};

inline FeasibilityDetail feasibility_detail(const ParamSet& p, const FeasibilityOptions& opt = {}) {
  FeasibilityDetail out;
  auto& r = out.report;
  const auto name = [](Margin m) { return std::string(kMarginNames[static_cast<std::size_t>(m)]); };
  const auto skip_rest = [&](Margin from, const std::string& why) {
    for (auto i = static_cast<std::size_t>(from); i < kMarginCount; ++i)
      r.add({kMarginNames[i], CheckKind::exact, "", std::nullopt, CheckStatus::fail, "not evaluated: " + why});
  };
  r.add_margin(name(Margin::b_positive), p.b);
  r.add_margin(name(Margin::alpha_positive), p.alpha);
  r.add_margin(name(Margin::beta_positive), p.beta);
  if (p.b.sign() <= 0 || p.alpha.sign() <= 0 || p.beta.sign() <= 0 || p.n < 3) {
    skip_rest(Margin::hessian_fxx, "nonpositive parameter");
    return out;
  }
  const Hessian h = hessian(p.n, p.a, p.alpha, p.beta);
  const Rational D = discriminant_D(p.n, p.a, p.alpha, p.beta);
  r.add_margin(name(Margin::hessian_fxx), h.fxx);
  r.add_margin(name(Margin::hessian_fyy), h.fyy);
  r.add_margin(name(Margin::discriminant_D), D);
  if (!r.all_pass()) {
    skip_rest(Margin::epsilon_positive, "quadratic not strictly convex");
    return out;
  }
  out.epsilon = epsilon_of(p).epsilon;
  r.add_margin(name(Margin::epsilon_positive), *out.epsilon);
  const Rational pre = mean_curv_precondition(p.n, p.alpha, p.beta);
  r.add_margin(name(Margin::mean_curv_precondition), pre);
  const Rational q = p.q();
  r.add_margin(name(Margin::q_below_4), Rational(4) - q);
  if (q >= Rational(4)) {
    skip_rest(Margin::spectral_coeff_bound, "q >= 4");
    return out;
  }
  if (p.n == 3)
    r.add_not_applicable(name(Margin::spectral_coeff_bound), "n = 3");
  else
    r.add_margin(name(Margin::spectral_coeff_bound),
                 Rational(p.n - 2, p.n - 3) - spectral_coeff(q, p.alpha, p.beta), true);
  if (pre.sign() <= 0) {
    skip_rest(Margin::L_max_numerator, "mean curvature coefficient undefined");
    return out;
  }
  const Rational num = L_max_numerator(p.n, q, p.alpha, p.beta);
  r.add_margin(name(Margin::L_max_numerator), num);
  if (num.sign() <= 0) {
    skip_rest(Margin::gamma0_bare_positive, "no admissible Young parameter");
    return out;
  }
  const auto lmax = L_max(p.n, q, p.alpha, p.beta);
  std::optional<Rational> L = opt.L_fixed ? opt.L_fixed : lmax;
  if (!opt.L_fixed && opt.L_cap && (!L || *opt.L_cap < *L)) L = opt.L_cap;
  if (!L) {
    // q = 2: the Hbar h cross term vanishes, any L works
    out.gamma0_bare = inverse(q);
    r.add_margin(name(Margin::gamma0_bare_positive), *out.gamma0_bare, false, "q = 2, L unconstrained");
    r.add_margin(name(Margin::hbar2_coefficient_at_L), num, true, "q = 2, L unconstrained");
    return out;
  }
  out.L = L;
  if (L->sign() <= 0) {
    skip_rest(Margin::gamma0_bare_positive, "L <= 0");
    return out;
  }
  out.gamma0_bare = gamma0(q, *L, p.alpha, p.beta).bare;
  r.add_margin(name(Margin::gamma0_bare_positive), *out.gamma0_bare, false, "L = " + L->str());
  r.add_margin(name(Margin::hbar2_coefficient_at_L), hbar2_coefficient(p.n, q, p.alpha, p.beta, *L), true,
               "L = " + L->str());
  return out;
}

inline ConstraintReport feasibility(const ParamSet& p, const FeasibilityOptions& opt = {}) {
  return feasibility_detail(p, opt).report;
}

// ---- floating mirror, used only to steer the search ----

using MarginScales = std::array<double, kMarginCount>;

/// Float copy of the exact margins; NaN marks a margin that could not be evaluated.
inline std::array<double, kMarginCount> margins_double(int n, double a, double b, double al, double be,
                                                       double L_cap = std::numeric_limits<double>::infinity()) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::array<double, kMarginCount> m;
  m.fill(nan);
  auto set = [&](Margin k, double v) { m[static_cast<std::size_t>(k)] = v; };
  set(Margin::b_positive, b);
  set(Margin::alpha_positive, al);
  set(Margin::beta_positive, be);
  if (b <= 0 || al <= 0 || be <= 0) return m;
  const double nd = n, md = n - 2.0;
  const double diag = 2 * (nd - 1) / md * a;
  const double fxx = diag - 2 * be, fyy = diag - 2 * al;
  const double D = 4 * nd / md * a * a - 4 * ((nd - 1) / md * be + al) * a + (4 * be - al) * al;
  set(Margin::hessian_fxx, fxx);
  set(Margin::hessian_fyy, fyy);
  set(Margin::discriminant_D, D);
  if (fxx <= 0 || fyy <= 0 || D <= 0) return m;
  const double num = md * al * al * al - ((nd * nd - 5 * nd + 8) * a + (3 * nd - 7) * be) * al * al +
                     (md * md * al - (nd - 1) * md * a) * be * be + 4 * md * a * al * be;
  const double Q = num / D;
  const double F0 = 2 * (nd - 1) * be + 2 * md * al - b * nd * md / 2 + Q;
  const double slope = (nd * nd - 4) / 4 * b - (nd * be + (nd - 1) * al) - std::max(md * be - al, (nd - 3) * al);
  const double F1 = 2 * (nd - 1) * be + 2 * md * al - b * nd * md / 2 + slope;
  set(Margin::epsilon_positive, std::min(F0, F1));
  const double pre = (nd - 1) * be - md * al;
  set(Margin::mean_curv_precondition, pre);
  const double q = b / be;
  set(Margin::q_below_4, 4 - q);
  if (q >= 4) return m;
  if (n > 3) set(Margin::spectral_coeff_bound, md / (nd - 3) - 4 / (4 - q) * be / al);
  if (pre <= 0) return m;
  const double mc = (4 * be * be - md * al * al) / (4 * be * pre);
  const double lnum = mc + 1 / q - 1;
  set(Margin::L_max_numerator, lnum);
  if (lnum <= 0) return m;
  const double hq = std::abs(0.5 - 1 / q);
  const double L = std::min(hq > 0 ? lnum / hq : std::numeric_limits<double>::infinity(), L_cap);
  set(Margin::gamma0_bare_positive, std::isfinite(L) ? 1 / q - hq / L : 1 / q);
  set(Margin::hbar2_coefficient_at_L, std::isfinite(L) ? lnum - L * hq : lnum);
  return m;
}

/// Minimum of margin/scale over evaluated margins; an unevaluated margin
/// means an earlier one already failed, so the minimum is already <= 0.
/// The Hbar^2 coefficient is zero by construction at L_max and is skipped.
inline double min_normalized_margin(const std::array<double, kMarginCount>& m, const MarginScales& scales) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kMarginCount; ++i) {
    if (i == static_cast<std::size_t>(Margin::hbar2_coefficient_at_L) || std::isnan(m[i])) continue;
    best = std::min(best, m[i] / scales[i]);
  }
  return best;
}

/// Scales from the exact margins of a reference row (1 where zero or absent).
inline MarginScales margin_scales(const ParamSet& reference) {
  MarginScales s;
  s.fill(1.0);
  const auto report = feasibility(reference);
  for (std::size_t i = 0; i < kMarginCount; ++i) {
    const auto* e = report.find(kMarginNames[i]);
    if (e && e->margin && !e->margin->is_zero()) s[i] = std::abs(e->margin->to_double());
  }
  return s;
}

// ---- search ----

enum class Objective { minimize_delta0, maximize_epsilon };

struct Range {
  double lo = 0, hi = 0;
};

struct SearchBox {
  Range b, alpha, beta;
  Range L{0, std::numeric_limits<double>::infinity()};
};

struct SearchConfig {
  int n = 3;
  Objective objective = Objective::minimize_delta0;
  std::uint64_t budget = 100000;
  std::int64_t denominator_bound = 1000000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  std::optional<SearchBox> box;  // default: reference row / 4 .. reference row * 4
  std::optional<Rational> delta0_fixed;  // maximize_epsilon only
  int max_bisection_steps = 16;
  unsigned threads = default_threads();
};

/// Row used to centre the default box and to scale margins: the published
/// row for n <= 5, otherwise a geometric extrapolation row(n-1)^2/row(n-2)
/// carried forward from n = 3, 4, 5.
struct ReferenceRow {
  double b, alpha, beta;
  std::optional<ParamSet> witness;  // exact published row when one exists
  ParamSet scale_row;
};

inline ReferenceRow reference_row(int n) {
  if (published::has_row(n)) {
    const auto p = ParamSet::published_row(n);
    return {p.b.to_double(), p.alpha.to_double(), p.beta.to_double(), p, p};
  }
  std::array<double, 3> prev2{}, prev1{};
  auto load = [](int k) {
    const auto r = published::row(k);
    return std::array<double, 3>{r.b.to_double(), r.alpha.to_double(), r.beta.to_double()};
  };
  prev2 = load(4);
  prev1 = load(5);
  for (int k = 6; k <= n; ++k) {
    std::array<double, 3> next{};
    for (int i = 0; i < 3; ++i) next[i] = prev1[i] * prev1[i] / prev2[i];
    prev2 = prev1;
    prev1 = next;
  }
  return {prev1[0], prev1[1], prev1[2], std::nullopt, ParamSet::published_row(5)};
}

inline SearchBox default_box(int n) {
  const auto ref = reference_row(n);
  return {{ref.b / 4, ref.b * 4}, {ref.alpha / 4, ref.alpha * 4}, {ref.beta / 4, ref.beta * 4}};
}

struct BisectionStep {
  Rational delta0;
  bool certified = false;
  double best_score = 0;
};

struct SearchResult {
  std::optional<ParamSet> best_params;
  bool certified = false;
  Rational epsilon;
  Rational delta0;
  ConstraintReport constraint_report;
  std::optional<Rational> improvement_vs_published;  // published minus found (delta0), or found minus published (eps)
  std::uint64_t evaluations = 0;
  std::vector<BisectionStep> trace;
  std::string note;
};

namespace detail {

struct Point {
  std::array<double, 3> x;  // log b, log alpha, log beta
  double score = -std::numeric_limits<double>::infinity();
};

struct LocalRun {
  Point best;
  std::uint64_t evaluations = 0;
};

/// Coordinate moves plus a few random directions per step size, so that the
/// max-min objective does not stall on a kink.
template <class Score>
LocalRun coordinate_descent(Point start, const std::array<Range, 3>& box, std::uint64_t budget, const Score& score,
                            std::uint64_t seed = 0) {
  std::array<double, 3> lo{}, hi{};
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::log(box[i].lo);
    hi[i] = std::log(box[i].hi);
    start.x[i] = std::clamp(start.x[i], lo[i], hi[i]);
  }
  Rng rng = chunk_rng(seed, 0xd1);
  LocalRun run;
  run.best = start;
  run.best.score = score(start.x);
  run.evaluations = 1;
  auto attempt = [&](const std::array<double, 3>& dir, double step) {
    Point trial = run.best;
    for (int i = 0; i < 3; ++i) trial.x[i] = std::clamp(trial.x[i] + dir[i] * step, lo[i], hi[i]);
    trial.score = score(trial.x);
    ++run.evaluations;
    if (trial.score > run.best.score) {
      run.best = trial;
      return true;
    }
    return false;
  };
  double step = 0.25;
  while (step > 1e-9 && run.evaluations < budget) {
    bool improved = false;
    for (int i = 0; i < 3 && !improved; ++i)
      for (double sgn : {1.0, -1.0}) {
        if (run.evaluations >= budget) break;
        std::array<double, 3> dir{};
        dir[i] = sgn;
        if ((improved = attempt(dir, step))) break;
      }
    for (int k = 0; k < 6 && !improved && run.evaluations < budget; ++k) {
      std::array<double, 3> dir{};
      double norm = 0;
      for (auto& d : dir) {
        d = 2 * uniform_unit(rng) - 1;
        norm += d * d;
      }
      norm = std::sqrt(norm);
      if (norm == 0) continue;
      for (auto& d : dir) d /= norm;
      improved = attempt(dir, step);
    }
    if (!improved) step /= 2;
  }
  return run;
}

inline std::array<double, 3> random_start(std::uint64_t seed, const std::array<Range, 3>& box) {
  Rng rng = chunk_rng(seed, 0x5eed);
  std::array<double, 3> x{};
  for (int i = 0; i < 3; ++i) {
    const double lo = std::log(box[i].lo), hi = std::log(box[i].hi);
    x[i] = lo + uniform_unit(rng) * (hi - lo);
  }
  return x;
}

struct MultiStart {
  std::vector<Point> bests;  // ordered by start index
  std::uint64_t evaluations = 0;
};

template <class Score>
MultiStart multistart(const std::vector<std::array<double, 3>>& starts, const std::array<Range, 3>& box,
                      std::uint64_t per_start_budget, unsigned threads, const Score& score) {
  const auto runs = parallel_chunks<LocalRun>(
      starts.size(), threads,
      [&](std::size_t i, std::size_t, std::size_t) {
        return coordinate_descent(Point{starts[i]}, box, per_start_budget, score, i + 1);
      },
      1);
  MultiStart out;
  for (const auto& r : runs) {
    out.bests.push_back(r.best);
    out.evaluations += r.evaluations;
  }
  return out;
}

inline std::vector<std::int64_t> denominator_ladder(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 10; d < bound; d *= 10) out.push_back(d);
  out.push_back(std::max<std::int64_t>(bound, 2));
  return out;
}

/// Rounds (b, alpha, beta) with increasing denominator bounds, sets a = delta0 b
/// exactly, and returns the first row that certifies.
inline std::optional<ParamSet> round_and_certify(int n, const Rational& delta0, const std::array<double, 3>& x,
                                                 std::int64_t den_bound, const FeasibilityOptions& opt) {
  for (auto den : denominator_ladder(den_bound)) {
    const BigInt md(static_cast<long>(den));
    const Rational b = best_rational_approximation(std::exp(x[0]), md);
    const Rational al = best_rational_approximation(std::exp(x[1]), md);
    const Rational be = best_rational_approximation(std::exp(x[2]), md);
    if (b.sign() <= 0 || al.sign() <= 0 || be.sign() <= 0) continue;
    const ParamSet p = ParamSet::from_delta0(n, delta0, b, al, be);
    if (feasibility(p, opt).all_pass()) return p;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::array<Range, 3> box_ranges(const SearchBox& box) { return {box.b, box.alpha, box.beta}; }

inline FeasibilityOptions options_for(const SearchBox& box) {
  FeasibilityOptions opt;
  if (std::isfinite(box.L.hi)) opt.L_cap = best_rational_approximation(box.L.hi, BigInt(1000000));
  return opt;
}

namespace detail {
inline std::vector<std::array<double, 3>> start_points(const SearchConfig& cfg, const ReferenceRow& ref,
                                                       const std::array<Range, 3>& box,
                                                       const std::optional<std::array<double, 3>>& warm) {
  std::vector<std::array<double, 3>> starts;
  starts.push_back({std::log(ref.b), std::log(ref.alpha), std::log(ref.beta)});
  if (warm) starts.push_back(*warm);
  for (std::size_t i = 1; i < cfg.seeds.size(); ++i) starts.push_back(random_start(cfg.seeds[i], box));
  return starts;
}

inline bool inside(const SearchBox& box, const ParamSet& p) {
  auto in = [](const Range& r, const Rational& v) { return r.lo <= v.to_double() && v.to_double() <= r.hi; };
  return in(box.b, p.b) && in(box.alpha, p.alpha) && in(box.beta, p.beta);
}

inline void fill_result(SearchResult& res, const ParamSet& p, const FeasibilityOptions& opt) {
  const auto fd = feasibility_detail(p, opt);
  res.best_params = p;
  res.constraint_report = fd.report;
  res.certified = fd.report.all_pass();
  res.delta0 = p.delta0();
  res.epsilon = fd.epsilon.value_or(Rational(0));
}
}  // namespace detail

inline SearchResult minimize_delta0(const SearchConfig& cfg) {
  const SearchBox box = cfg.box.value_or(default_box(cfg.n));
  const auto ranges = box_ranges(box);
  const auto opt = options_for(box);
  const ReferenceRow ref = reference_row(cfg.n);
  const MarginScales scales = margin_scales(ref.scale_row);
  SearchResult res;
  Rational lo(0), hi(1);
  if (ref.witness && detail::inside(box, *ref.witness)) {
    detail::fill_result(res, *ref.witness, opt);
    hi = ref.witness->delta0();
    res.trace.push_back({hi, res.certified, 0});
  }
  const std::uint64_t steps = static_cast<std::uint64_t>(std::max(1, cfg.max_bisection_steps));
  const std::uint64_t starts_per_step = cfg.seeds.size() + 1;
  const std::uint64_t per_start = std::max<std::uint64_t>(1, cfg.budget / (steps * starts_per_step));
  std::optional<std::array<double, 3>> warm;
  std::optional<detail::Point> best_uncertified;
  bool first = !res.certified;
  for (std::uint64_t step = 0; step < steps; ++step) {
    if (res.evaluations + per_start * starts_per_step > cfg.budget) break;
    Rational cand;
    if (first) {
      cand = hi;  // no witness: probe delta0 = 1 first
    } else {
      const Rational third = (hi - lo) / 3;
      cand = simplest_rational_between(lo + third, hi - third);
    }
    const double d0 = cand.to_double();
    auto score = [&](const std::array<double, 3>& x) {
      const double b = std::exp(x[0]);
      return min_normalized_margin(margins_double(cfg.n, d0 * b, b, std::exp(x[1]), std::exp(x[2]), box.L.hi),
                                   scales);
    };
    const auto ms = detail::multistart(detail::start_points(cfg, ref, ranges, warm), ranges, per_start,
                                       cfg.threads, score);
    res.evaluations += ms.evaluations;
    bool certified = false;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& pt : ms.bests) {
      best_score = std::max(best_score, pt.score);
      if (!best_uncertified || pt.score > best_uncertified->score) best_uncertified = pt;
      if (certified || !(pt.score > 0)) continue;
      if (auto p = detail::round_and_certify(cfg.n, cand, pt.x, cfg.denominator_bound, opt)) {
        detail::fill_result(res, *p, opt);
        warm = pt.x;
        certified = true;
      }
    }
    res.trace.push_back({cand, certified, best_score});
    if (first) {
      first = false;
      if (!certified) break;
      hi = cand;
      continue;
    }
    (certified ? hi : lo) = cand;
  }
  if (!res.certified && best_uncertified) {
    // best infeasibility profile: round the best float point and report its exact margins
    const auto& x = best_uncertified->x;
    const BigInt md(static_cast<long>(cfg.denominator_bound));
    const Rational b = best_rational_approximation(std::exp(x[0]), md);
    const ParamSet p{cfg.n, b * hi, b, best_rational_approximation(std::exp(x[1]), md),
                     best_rational_approximation(std::exp(x[2]), md)};
    detail::fill_result(res, p, opt);
    res.note = "no certified row found; margins of the best candidate at delta0 = " + hi.str();
  }
  if (ref.witness && res.certified) res.improvement_vs_published = ref.witness->delta0() - res.delta0;
  return res;
}

inline SearchResult maximize_epsilon(const SearchConfig& cfg, const Rational& delta0_fixed) {
  const SearchBox box = cfg.box.value_or(default_box(cfg.n));
  const auto ranges = box_ranges(box);
  const auto opt = options_for(box);
  const ReferenceRow ref = reference_row(cfg.n);
  const MarginScales scales = margin_scales(ref.scale_row);
  SearchResult res;
  res.delta0 = delta0_fixed;
  std::optional<Rational> published_eps;
  if (ref.witness && ref.witness->delta0() == delta0_fixed) {
    published_eps = epsilon_of(*ref.witness).epsilon;
    if (detail::inside(box, *ref.witness)) detail::fill_result(res, *ref.witness, opt);
  }
  const double d0 = delta0_fixed.to_double();
  auto score = [&](const std::array<double, 3>& x) {
    const double b = std::exp(x[0]);
    const auto m = margins_double(cfg.n, d0 * b, b, std::exp(x[1]), std::exp(x[2]), box.L.hi);
    const double mm = min_normalized_margin(m, scales);
    return mm > 0 ? m[static_cast<std::size_t>(Margin::epsilon_positive)] : mm - 1;
  };
  const auto starts = detail::start_points(cfg, ref, ranges, std::nullopt);
  const std::uint64_t per_start = std::max<std::uint64_t>(1, cfg.budget / starts.size());
  const auto ms = detail::multistart(starts, ranges, per_start, cfg.threads, score);
  res.evaluations = ms.evaluations;
  for (const auto& pt : ms.bests) {
    if (!(pt.score > 0)) continue;
    if (auto p = detail::round_and_certify(cfg.n, delta0_fixed, pt.x, cfg.denominator_bound, opt)) {
      const auto eps = epsilon_of(*p).epsilon;
      if (!res.certified || eps > res.epsilon) detail::fill_result(res, *p, opt);
    }
  }
  if (!res.certified) res.note = "no certified row found at delta0 = " + delta0_fixed.str();
  if (published_eps && res.certified) res.improvement_vs_published = res.epsilon - *published_eps;
  return res;
}

// ---- sensitivity ----

struct SensitivityRow {
  std::string parameter;
  std::string constraint;
  std::optional<Rational> base, plus, minus;
  std::optional<Rational> derivative;  // (plus - minus) / (2h), when h != 0
};

struct SensitivityReport {
  Rational step;
  std::vector<SensitivityRow> rows;
  std::vector<std::string> binding;
};

inline SensitivityReport sensitivity_report(const ParamSet& p, const Rational& h) {
  SensitivityReport out;
  out.step = h;
  const auto base = feasibility_detail(p);
  const Rational L0 = base.L.value_or(Rational(1));
  struct Variant {
    std::string name;
    ParamSet lo, hi;
    FeasibilityOptions opt_lo, opt_hi;
  };
  auto shift = [&](Rational ParamSet::*field, const Rational& d) {
    ParamSet q = p;
    q.*field += d;
    return q;
  };
  std::vector<Variant> vars;
  vars.push_back({"a", shift(&ParamSet::a, -h), shift(&ParamSet::a, h), {}, {}});
  vars.push_back({"b", shift(&ParamSet::b, -h), shift(&ParamSet::b, h), {}, {}});
  vars.push_back({"alpha", shift(&ParamSet::alpha, -h), shift(&ParamSet::alpha, h), {}, {}});
  vars.push_back({"beta", shift(&ParamSet::beta, -h), shift(&ParamSet::beta, h), {}, {}});
  FeasibilityOptions Llo, Lhi;
  Llo.L_fixed = L0 - h;
  Lhi.L_fixed = L0 + h;
  vars.push_back({"L", p, p, Llo, Lhi});
  for (const auto& v : vars) {
    const auto lo = feasibility(v.lo, v.opt_lo);
    const auto hi = feasibility(v.hi, v.opt_hi);
    for (const auto& e : base.report.entries()) {
      SensitivityRow row{v.name, e.name, e.margin, std::nullopt, std::nullopt, std::nullopt};
      if (const auto* x = hi.find(e.name)) row.plus = x->margin;
      if (const auto* x = lo.find(e.name)) row.minus = x->margin;
      if (!h.is_zero() && row.plus && row.minus) row.derivative = (*row.plus - *row.minus) / (2 * h);
      out.rows.push_back(std::move(row));
    }
  }
  const MarginScales scales = margin_scales(reference_row(p.n).scale_row);
  std::optional<double> smallest;
  std::string smallest_name;
  for (const auto& e : base.report.entries()) {
    if (!e.margin) continue;
    if (e.margin->is_zero()) {
      out.binding.push_back(e.name);
      continue;
    }
    std::size_t idx = 0;
    while (idx < kMarginCount && e.name != kMarginNames[idx]) ++idx;
    const double rel = e.margin->to_double() / (idx < kMarginCount ? scales[idx] : 1.0);
    if (!smallest || rel < *smallest) {
      smallest = rel;
      smallest_name = e.name;
    }
  }
  if (!smallest_name.empty()) out.binding.push_back(smallest_name);
  return out;
}

}  // namespace stabcert
