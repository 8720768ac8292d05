#pragma once

// Assembles certificates from the individual checks.

#include <cstdint>
#include <string>
#include <vector>

#include "stabcert/approx.hpp"
#include "stabcert/bubble.hpp"
#include "stabcert/certificate.hpp"
#include "stabcert/config.hpp"
#include "stabcert/curvature.hpp"
#include "stabcert/iteration.hpp"
#include "stabcert/optimizer.hpp"
#include "stabcert/published.hpp"
#include "stabcert/quadratic_min.hpp"

namespace stabcert {

namespace detail {

inline std::string yes_no(bool b) { return b ? "true" : "false"; }

inline ConstraintEntry bool_check(std::string name, bool ok, std::string detail = {},
                                  CheckKind kind = CheckKind::exact) {
  return {std::move(name), kind, ok ? "true" : "false", std::nullopt, ok ? CheckStatus::pass : CheckStatus::fail,
          std::move(detail)};
}

inline ConstraintEntry margin_check(std::string name, const Rational& m, bool allow_zero = false,
                                    std::string detail = {}) {
  ConstraintReport r;
  r.add_margin(std::move(name), m, allow_zero, std::move(detail));
  return r.entries().front();
}

inline KeyValues environment_of(const RunConfig& cfg) {
  return {{"seed", std::to_string(cfg.seed)},
          {"precision_digits", std::to_string(cfg.precision_digits)},
          {"reported_digits", std::to_string(approx::kReportedDigits)},
          {"lemma32_samples", std::to_string(cfg.lemma32_samples)},
          {"barrier_samples", std::to_string(cfg.barrier_samples)},
          {"quadform_samples", std::to_string(cfg.quadform_samples)},
          {"linearity_samples", std::to_string(cfg.linearity_samples)},
          {"C_MS", approx::format(approx::HighFloat(cfg.C_MS))},
          {"C_MS_source", cfg.C_MS_set ? "configured" : "placeholder default 1 (non-physical)"},
          {"R", approx::format(approx::HighFloat(cfg.R))},
          {"s", cfg.s.str()},
          {"s1", cfg.s1.str()},
          {"config_source", cfg.source},
          {"rational_backend", "GMP mpq"},
          {"float_backend", "MPFR via boost::multiprecision"}};
}

inline void row_params(Section& s, const ParamSet& p) {
  s.params = {{"a", p.a.str()},         {"b", p.b.str()},   {"alpha", p.alpha.str()},
              {"beta", p.beta.str()},   {"delta0", p.delta0().str()}, {"q", p.q().str()}};
}

}  // namespace detail

/// Full chain on one published row.
inline Section verify_row_section(int n, const RunConfig& cfg, std::vector<std::string>& flags) {
  using detail::bool_check;
  using detail::margin_check;
  const ParamSet p = ParamSet::published_row(n);
  const auto quoted = published::quoted(n);
  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(n) * 1000003u;
  Section s;
  s.name = "row n=" + std::to_string(n);
  s.n = n;
  detail::row_params(s, p);

  s.check(bool_check("a_equals_b_delta0", p.a == p.b * quoted.delta0,
                     p.b.str() + " * " + quoted.delta0.str() + " = " + (p.b * quoted.delta0).str()));
  s.target("delta0", quoted.delta0.str(), p.delta0().str());

  // quadratic minimisation
  const Hessian h = hessian(n, p.a, p.alpha, p.beta);
  const Rational D = discriminant_D(n, p.a, p.alpha, p.beta);
  s.value("f_xx", h.fxx.str());
  s.value("f_yy", h.fyy.str());
  s.value("f_xy", h.fxy.str());
  s.value("discriminant_D", D.str());
  s.check(margin_check("hessian_fxx", h.fxx));
  s.check(margin_check("hessian_fyy", h.fyy));
  s.check(margin_check("discriminant_D", D));
  if (!hessian_conditions(n, p.a, p.alpha, p.beta).all()) return s;
  const QuadMinInput in = p.quad_input();
  const auto [xs, ys] = critical_point(in);
  const Rational Q = f_min_closed_form(n, p.a, p.alpha, p.beta);
  const auto grad = gradient(in, xs, ys);
  s.value("x_star", xs.str());
  s.value("y_star", ys.str());
  s.value("f_min_coefficient", Q.str());
  s.value("hessian_determinant", h.determinant().str());
  s.check(bool_check("critical_point_stationary", grad.first.is_zero() && grad.second.is_zero(),
                     "gradient (" + grad.first.str() + ", " + grad.second.str() + ")"));
  s.check(bool_check("f_at_critical_point", f_eval(in, xs, ys) == Q, "f(x*, y*) = E^2 Q with E = 1"));
  s.check(bool_check("hessian_determinant_equals_D", h.determinant() == D));

  // F and epsilon
  const EpsilonResult eps = epsilon_of(p);
  s.value("F_at_0", eps.F_at_0.str());
  s.value("F_at_1", eps.F_at_1.str());
  s.value("max_branch", std::string(to_string(eps.max_branch)));
  s.value("epsilon", eps.epsilon.str());
  s.check(margin_check("epsilon_positive", eps.epsilon));
  s.check(bool_check("F_linear_in_t", linearity_check(p, cfg.linearity_samples, seed), "", CheckKind::sampled));
  s.checks_from(lemma32_sampling_check(p, cfg.lemma32_samples, seed + 1, cfg.threads));
  s.target("epsilon", quoted.epsilon.str(), eps.epsilon.str());

  // bubble coefficients
  const Rational q = p.q();
  s.checks_from(spectral_coeff_check(p));
  s.value("spectral_coeff", spectral_coeff(q, p.alpha, p.beta).str());
  s.check(margin_check("mean_curv_precondition", mean_curv_precondition(n, p.alpha, p.beta)));
  const Rational mc = mean_curv_coeff(n, p.alpha, p.beta);
  s.value("mean_curv_coeff", mc.str());
  s.checks_from(quadform_lower_bound_check(n, p.alpha, p.beta, cfg.quadform_samples, seed + 2));
  const auto lmax = L_max(n, q, p.alpha, p.beta);
  if (!lmax) {
    s.value("L_max", "unconstrained (q = 2)");
    return s;
  }
  s.value("L_max", lmax->str());
  s.target("L", quoted.L.str(), lmax->str());
  s.check(margin_check("hbar2_coefficient_at_L_max", hbar2_coefficient(n, q, p.alpha, p.beta, *lmax), true,
                       "zero by construction"));
  const Gamma0 g = gamma0(q, *lmax, p.alpha, p.beta);
  s.value("gamma0_bare", g.bare.str());
  s.value("gamma0_with_ratio", g.with_ratio.str());
  s.check(margin_check("gamma0_bare_positive", g.bare));
  s.target("gamma0", quoted.gamma0.str(), g.bare.str());
  flags.push_back("gamma0 convention, n=" + std::to_string(n) + ": quoted value " + quoted.gamma0.str() +
                  " equals the bare bracket; the defining line multiplies by beta/alpha, giving " +
                  g.with_ratio.str() + "; both conventions are carried through x0, y0 and the growth constants");

  struct Convention {
    const char* tag;
    Rational gamma;
  };
  bool area_done = false;
  for (const Convention& c : {Convention{"bare", g.bare}, Convention{"with_ratio", g.with_ratio}}) {
    const std::string tag = c.tag;
    const BarrierSurds bs = x0_y0(p.alpha, p.beta, eps.epsilon, c.gamma);
    s.value("x0_" + tag, bs.x0.str());
    s.value("y0_" + tag, bs.y0.str());
    s.check(bool_check("surd_identity_product_" + tag, barrier_identity_product(bs, p.alpha, p.beta, eps.epsilon),
                       "2(beta/alpha) x0 y0 = eps/(2 alpha)"));
    s.check(bool_check("surd_identity_ratio_" + tag, barrier_identity_ratio(bs, p.alpha, p.beta, c.gamma),
                       "2(beta/alpha) y0/x0 = gamma0"));
    const auto ode = barrier_ode_check(bs.x0, bs.y0, cfg.barrier_samples, seed + 3, cfg.precision_digits);
    s.check({"barrier_ode_" + tag, CheckKind::approximate,
             std::to_string(ode.breaches) + " breaches in " + std::to_string(ode.samples) + " samples", std::nullopt,
             ode.breaches == 0 ? CheckStatus::pass : CheckStatus::fail,
             "max |residual|/(1+eta^2) = " + ode.max_relative_residual + ", midpoint " + ode.midpoint_residual});
    const GrowthConstants gc = growth_constants(n, p.alpha, eps.epsilon, bs.y0, cfg.precision_digits);
    if (!area_done) {
      s.approx("area_const", gc.area_const, gc.digits);
      area_done = true;
    }
    s.approx("volume_const_" + tag, gc.volume_const, gc.digits);
  }
  return s;
}

inline Certificate verify_published_row(int n, const RunConfig& cfg) {
  Certificate c;
  c.command = "verify";
  c.sections.push_back(verify_row_section(n, cfg, c.flags));
  c.environment = detail::environment_of(cfg);
  return c;
}

inline Section delta1_section() {
  Section s;
  s.name = "delta1";
  for (int n : published::kRows) {
    const std::string k = "n" + std::to_string(n);
    s.value("delta0_" + k, published::quoted(n).delta0.str());
    s.value("delta_c_" + k, delta_c(n).str());
    s.target("delta1_" + k, published::quoted(n).delta1.str(), delta1_of(n).str());
  }
  return s;
}

inline Section corollary_section() {
  using detail::bool_check;
  Section s;
  s.name = "critical_exponent";
  for (int n = 3; n <= 12; ++n) {
    const std::string k = "n" + std::to_string(n);
    const auto c = corollary11_collapse(n);
    s.value("radicand_" + k, c.radicand.str());
    s.value("boundary_two_k_" + k, c.boundary_two_k.str());
    s.value("boundary_p_" + k, c.boundary_p.str());
    s.check(bool_check("collapse_" + k, c.collapses(),
                       "sqrt(radicand) = " + (c.root ? c.root->str() : std::string("irrational")) + ", expected " +
                           c.expected_root.str()));
    s.check(bool_check("boundary_p_equals_n_" + k, c.boundary_p == Rational(n)));
    const Rational delta = c.delta_c + Rational(1, 1000);
    const auto e = corollary11_exponent(n, delta);
    s.value("two_k_" + k, e.two_k.str());
    s.value("p_" + k, e.p.str());
    s.check(bool_check("p_exceeds_n_" + k, e.p_exceeds_n, "delta = " + delta.str()));
    s.check(bool_check("two_k_admissible_" + k, e.two_k_admissible, "delta = " + delta.str()));
  }
  return s;
}

inline Section caccioppoli_section(const RunConfig& cfg) {
  using detail::bool_check;
  Section s;
  s.name = "caccioppoli";
  for (int n : published::kRows) {
    const std::string k = "n" + std::to_string(n);
    const Rational delta = delta1_of(n) + Rational(1, 1000);
    const Rational kk = delta / 2;
    const KInterval iv = k_interval(n, delta);
    s.value("delta_" + k, delta.str());
    s.value("two_k_" + k, delta.str());
    s.check(bool_check("two_k_in_interval_" + k, iv.contains(2 * kk),
                       "(" + iv.lower->str() + ", " + iv.upper->str() + ")"));
    s.check(detail::margin_check("limit_coefficient_" + k, thm12_limit_coefficient(n, delta, kk)));
    const auto cc = caccioppoli_constants(n, delta, kk, cfg.s, cfg.s1);
    s.value("branch1_coeff_" + k, cc.branch1_coeff.str());
    s.value("branch2_coeff_" + k, cc.branch2_coeff.str());
    s.value("C1_" + k, cc.C1.str());
    s.value("p_" + k, cc.p.str());
    if (cc.C2) s.value("C2_" + k, cc.C2->str());
    s.approx("C2_" + k, cc.C2_approx);
    s.check(bool_check("both_branches_positive_" + k, cc.both_branches_positive,
                       "s = " + cfg.s.str() + ", s1 = " + cfg.s1.str()));
  }
  return s;
}

inline std::vector<QDeltaPoint> default_epsilon1_grid() {
  std::vector<QDeltaPoint> g{{3, Rational(1, 2), Rational(1)}};
  for (int n : published::kRows)
    for (const Rational& delta : {delta1_of(n), Rational(1)}) g.push_back({n, (sobolev_ratio(n) + delta) / 2, delta});
  return g;
}

inline Section degiorgi_section(const RunConfig& cfg) {
  Section s;
  s.name = "degiorgi";
  const auto grid = cfg.epsilon1_grid.empty() ? default_epsilon1_grid() : cfg.epsilon1_grid;
  int i = 0;
  for (const auto& pt : grid) {
    const std::string k = std::to_string(i++);
    s.value("point_" + k, "n=" + std::to_string(pt.n) + " q=" + pt.q.str() + " delta=" + pt.delta.str());
    const bool in_window = sobolev_ratio(pt.n) < pt.q && pt.q < pt.delta;
    if (!in_window) {
      s.check({"q_window_" + k, CheckKind::exact, "", std::nullopt, CheckStatus::fail,
               "q must lie in ((n-2)/n, delta)"});
      continue;
    }
    const auto d = degiorgi_constants(pt.n, pt.delta, pt.q, cfg.C_MS, cfg.R);
    s.value("C_log2_" + k, d.C.exponent.str());
    s.value("R_exponents_" + k, d.R_exponent_1.str() + ", " + d.R_exponent_2.str());
    s.value("hypothesis_exponent_" + k, d.hypothesis_exponent.str());
    s.approx("C0_" + k, d.C0);
    s.approx("epsilon1_" + k, epsilon1_threshold(pt.n, pt.delta, pt.q, cfg.C_MS));
  }
  return s;
}

inline Certificate verify_all(const RunConfig& cfg) {
  Certificate c;
  c.command = "verify-all";
  for (int n : published::kRows) c.sections.push_back(verify_row_section(n, cfg, c.flags));
  c.sections.push_back(delta1_section());
  c.sections.push_back(corollary_section());
  c.sections.push_back(caccioppoli_section(cfg));
  if (cfg.C_MS_set) c.sections.push_back(degiorgi_section(cfg));
  c.environment = detail::environment_of(cfg);
  return c;
}

// ---- search ----

inline std::string to_string(Objective o) {
  return o == Objective::minimize_delta0 ? "minimize_delta0" : "maximize_epsilon";
}

inline Section sensitivity_section(const ParamSet& p, const Rational& h) {
  const SensitivityReport rep = sensitivity_report(p, h);
  Section s;
  s.name = "sensitivity";
  s.n = p.n;
  s.value("step", rep.step.str());
  std::string binding;
  for (const auto& b : rep.binding) binding += (binding.empty() ? "" : ", ") + b;
  s.value("binding", binding);
  for (const auto& row : rep.rows)
    s.value("d_" + row.constraint + "/d_" + row.parameter, row.derivative ? row.derivative->str() : "n/a");
  return s;
}

inline Certificate search_certificate(const SearchResult& r, const SearchConfig& sc, const RunConfig& rc) {
  Certificate c;
  c.command = "optimize";
  Section s;
  s.name = "search";
  s.n = sc.n;
  if (r.best_params) detail::row_params(s, *r.best_params);
  const SearchBox box = sc.box.value_or(default_box(sc.n));
  s.value("objective", to_string(sc.objective));
  s.value("certified", detail::yes_no(r.certified));
  s.value("delta0", r.delta0.str());
  s.value("epsilon", r.epsilon.str());
  s.value("improvement_vs_published", r.improvement_vs_published ? r.improvement_vs_published->str() : "n/a");
  s.value("evaluations", std::to_string(r.evaluations));
  const auto opt = options_for(box);
  if (opt.L_cap) s.value("L_cap", opt.L_cap->str());
  if (!r.note.empty()) s.value("note", r.note);
  s.checks_from(r.constraint_report);
  c.sections.push_back(std::move(s));
  Section t;
  t.name = "bisection";
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    t.value("step_" + std::to_string(i), "delta0=" + r.trace[i].delta0.str() + " certified=" +
                                             detail::yes_no(r.trace[i].certified) +
                                             " best_score=" + approx::format(approx::HighFloat(r.trace[i].best_score)));
  c.sections.push_back(std::move(t));
  if (r.certified && r.best_params) c.sections.push_back(sensitivity_section(*r.best_params, Rational(1, 1000)));
  if (published::has_row(sc.n) && r.certified && r.improvement_vs_published && r.improvement_vs_published->sign() > 0)
    c.flags.push_back("certified row improves on the published row for n=" + std::to_string(sc.n));
  if (!published::has_row(sc.n) && r.certified)
    c.flags.push_back("FINDING: certified row for n=" + std::to_string(sc.n) + ", beyond the published rows");
  auto range = [](const Range& rg) { return approx::format(approx::HighFloat(rg.lo)) + ", " + approx::format(approx::HighFloat(rg.hi)); };
  c.environment = detail::environment_of(rc);
  std::string seeds;
  for (auto sd : sc.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(sd);
  c.environment.insert(c.environment.end(), {{"budget", std::to_string(sc.budget)},
                                             {"denominator_bound", std::to_string(sc.denominator_bound)},
                                             {"seeds", seeds},
                                             {"max_bisection_steps", std::to_string(sc.max_bisection_steps)},
                                             {"box_b", range(box.b)},
                                             {"box_alpha", range(box.alpha)},
                                             {"box_beta", range(box.beta)},
                                             {"box_L", range(box.L)}});
  return c;
}

inline SearchResult run_search(const SearchConfig& sc) {
  if (sc.objective == Objective::minimize_delta0) return minimize_delta0(sc);
  const Rational d0 = sc.delta0_fixed ? *sc.delta0_fixed
                                      : (published::has_row(sc.n) ? published::quoted(sc.n).delta0 : Rational(1));
  return maximize_epsilon(sc, d0);
}

/// Re-runs feasibility from the serialized search section alone and compares
/// every exact margin and status.
inline bool recertify(const Certificate& c) {
  const Section* s = c.find_section("search");
  if (!s || !s->n) return false;
  const std::string* cert = s->find_value("certified");
  if (!cert || *cert != "true") return false;
  auto param = [&](const char* key) {
    for (const auto& [k, v] : s->params)
      if (k == key) return Rational::parse(v);
    throw std::invalid_argument(std::string("missing parameter ") + key);
  };
  try {
    const ParamSet p{*s->n, param("a"), param("b"), param("alpha"), param("beta")};
    FeasibilityOptions opt;
    if (const auto* cap = s->find_value("L_cap")) opt.L_cap = Rational::parse(*cap);
    const ConstraintReport r = feasibility(p, opt);
    if (!r.all_pass() || r.entries().size() != s->checks.size()) return false;
    for (std::size_t i = 0; i < r.entries().size(); ++i) {
      const auto& a = r.entries()[i];
      const auto& b = s->checks[i];
      if (a.name != b.name || a.margin != b.margin || a.status != b.status) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// ---- recursion ----

inline Certificate recursion_certificate(const RecursionResult& r, int n, double S1, double C0, double C) {
  Certificate c;
  c.command = "recursion-sim";
  Section s;
  s.name = "recursion";
  s.n = n;
  auto f = [](double v) { return approx::format(approx::HighFloat(v)); };
  s.params = {{"S1", f(S1)}, {"C0", f(C0)}, {"C", f(C)}};
  s.value("log_product", f(r.log_product));
  for (const auto& st : r.steps)
    s.value("S_" + std::to_string(st.odd_index), "log S = " + f(st.log_S) + ", log bound = " + f(st.log_bound));
  s.value("tends_to_zero", detail::yes_no(r.tends_to_zero));
  s.check(detail::bool_check("closed_bound_respected", r.bound_respected, "", CheckKind::approximate));
  s.check(detail::bool_check("log_direct_agree", r.log_direct_agree, "", CheckKind::approximate));
  s.check(detail::bool_check("exponent_sum_identity", r.exponent_sum_check.is_zero()));
  c.sections.push_back(std::move(s));
  return c;
}

}  // namespace stabcert
