#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "stabcert/certificate.hpp"
#include "stabcert/config.hpp"
#include "stabcert/pipeline.hpp"

using namespace stabcert;

namespace {

struct Options {
  std::optional<int> n;
  std::optional<int> n_positional;
  bool strict = false;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<double> cms;
  std::optional<double> radius;
  std::string objective;
  std::string delta0;
  // recursion-sim
  std::optional<double> s1, c0, c;
  std::string q, delta;
  std::size_t steps = 12;
  std::string report_path;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, Options& o, bool with_n = true) {
  if (with_n) sub->add_option("--n", o.n, "dimension");
  sub->add_flag("--strict", o.strict, "exit 3 when a published value is not reproduced");
  sub->add_option("--config", o.config, "key = value configuration file");
  sub->add_option("--out", o.out, "certificate output path");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--budget", o.budget, "search evaluation budget");
  sub->add_option("--cms", o.cms, "Sobolev constant C_MS");
  sub->add_option("--radius", o.radius, "radius R");
}

void load(const Options& o, RunConfig& run, SearchConfig& search) {
  if (!o.config.empty()) load_config_file(o.config, run, search);
  if (o.seed) {
    run.seed = *o.seed;
    search.seeds.clear();
    for (std::uint64_t i = 0; i < 8; ++i) search.seeds.push_back(*o.seed + i);
  }
  if (o.budget) {
    if (*o.budget < 1) throw UsageError("--budget must be >= 1");
    search.budget = *o.budget;
  }
  if (o.cms) {
    if (!(*o.cms > 0)) throw UsageError("--cms must be positive");
    run.C_MS = *o.cms;
    run.C_MS_set = true;
  }
  if (o.radius) {
    if (!(*o.radius > 1)) throw UsageError("--radius must exceed 1");
    run.R = *o.radius;
  }
}

Rational parse_rational_arg(const std::string& name, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw UsageError(name + " expects p/q, got '" + text + "'");
  }
}

std::string default_out(const std::string& command, std::optional<int> n) {
  return command + (n ? "-" + std::to_string(*n) : std::string()) + ".cert.json";
}

void append_run_log(const RunConfig& run, const std::string& command, int code, const std::string& path) {
  if (run.run_log.empty()) return;
  std::ofstream log(run.run_log, std::ios::app);
  const std::time_t t = std::time(nullptr);
  log << std::put_time(std::gmtime(&t), "%FT%TZ") << ' ' << command << " exit=" << code << ' ' << path << '\n';
}

void print_summary(const Certificate& c, std::ostream& os) {
  os << c.command << ": " << overall_status(c) << '\n';
  for (const auto& s : c.sections) {
    os << "[" << s.name << "]\n";
    for (const auto& key : {"epsilon", "L_max", "gamma0_bare", "delta0", "certified", "improvement_vs_published"})
      if (const auto* v = s.find_value(key)) os << "  " << key << " = " << *v << '\n';
    std::size_t pass = 0;
    for (const auto& e : s.checks) {
      if (e.status == CheckStatus::pass) {
        ++pass;
        continue;
      }
      os << "  " << to_string(e.status) << ": " << e.name;
      if (!e.value.empty()) os << " (" << e.value << ")";
      if (!e.detail.empty()) os << " " << e.detail;
      os << '\n';
    }
    os << "  " << pass << "/" << s.checks.size() << " checks pass\n";
  }
  for (const auto& f : c.flags) os << "flag: " << f << '\n';
}

// report renders every field verbatim.
void print_report(const Certificate& c, std::ostream& os) {
  os << "schema_version " << c.schema_version << ", command " << c.command << ", status " << overall_status(c)
     << '\n';
  for (const auto& s : c.sections) {
    os << "\n== " << s.name;
    if (s.n) os << " (n = " << *s.n << ")";
    os << " ==\n";
    for (const auto& [k, v] : s.params) os << "  param  " << k << " = " << v << '\n';
    for (const auto& [k, v] : s.values) os << "  value  " << k << " = " << v << '\n';
    for (const auto& [k, v] : s.approximate) os << "  approx " << k << " = " << v.value << " (" << v.digits << " digits)\n";
    for (const auto& e : s.checks) {
      os << "  " << std::left << std::setw(14) << to_string(e.status) << std::setw(12) << to_string(e.kind) << e.name;
      if (e.margin) os << "  margin " << e.margin->str();
      if (!e.value.empty()) os << "  value " << e.value;
      if (!e.detail.empty()) os << "  [" << e.detail << "]";
      os << '\n';
    }
    for (const auto& t : s.published_targets)
      os << "  target " << t.quantity << ": quoted " << t.quoted_value << ", computed " << t.computed_value
         << (t.match ? " (match)" : " (DISCREPANCY)") << '\n';
  }
  if (!c.flags.empty()) os << '\n';
  for (const auto& f : c.flags) os << "flag: " << f << '\n';
  os << "\nenvironment:\n";
  for (const auto& [k, v] : c.environment) os << "  " << k << " = " << v << '\n';
}

int finish(const Certificate& c, const Options& o, const RunConfig& run, const std::string& path) {
  write_atomic(path, serialize(c));
  print_summary(c, std::cout);
  std::cout << "certificate: " << path << '\n';
  const int code = exit_code(c, o.strict);
  append_run_log(run, c.command, code, path);
  return code;
}

int cmd_verify(const Options& o) {
  RunConfig run;
  SearchConfig search;
  load(o, run, search);
  const std::optional<int> n = o.n ? o.n : o.n_positional;
  if (!n) throw UsageError("verify needs n (3, 4 or 5)");
  if (!published::has_row(*n)) throw UsageError("no published row for n = " + std::to_string(*n));
  const Certificate c = verify_published_row(*n, run);
  return finish(c, o, run, o.out.empty() ? default_out("verify", n) : o.out);
}

int cmd_verify_all(const Options& o) {
  RunConfig run;
  SearchConfig search;
  load(o, run, search);
  const Certificate c = verify_all(run);
  return finish(c, o, run, o.out.empty() ? default_out("verify-all", std::nullopt) : o.out);
}

int cmd_optimize(const Options& o) {
  RunConfig run;
  SearchConfig search;
  load(o, run, search);
  if (o.n) {
    if (*o.n < 3 || *o.n > 64) throw UsageError("--n must be in 3..64");
    if (search.box && search.n != *o.n) search.box.reset();
    search.n = *o.n;
  }
  if (!o.objective.empty()) {
    if (o.objective == "delta0")
      search.objective = Objective::minimize_delta0;
    else if (o.objective == "epsilon")
      search.objective = Objective::maximize_epsilon;
    else
      throw UsageError("--objective must be delta0 or epsilon");
  }
  if (!o.delta0.empty()) {
    const Rational d = parse_rational_arg("--delta0", o.delta0);
    if (d.sign() <= 0) throw UsageError("--delta0 must be positive");
    search.delta0_fixed = d;
  }
  search.threads = run.threads;
  const SearchResult r = run_search(search);
  const Certificate c = search_certificate(r, search, run);
  return finish(c, o, run, o.out.empty() ? default_out("optimize", search.n) : o.out);
}

int cmd_recursion(const Options& o) {
  RunConfig run;
  SearchConfig search;
  load(o, run, search);
  const int n = o.n.value_or(3);
  if (n < 3) throw UsageError("--n must be >= 3");
  double C0 = 1, C = 1, S1 = 0.5;
  if (!o.q.empty() || !o.delta.empty()) {
    // constants from the De Giorgi bracket
    if (o.q.empty() || o.delta.empty()) throw UsageError("--q and --delta go together");
    const Rational q = parse_rational_arg("--q", o.q), delta = parse_rational_arg("--delta", o.delta);
    if (!(sobolev_ratio(n) < q && q < delta)) throw UsageError("q must lie in ((n-2)/n, delta)");
    const auto d = degiorgi_constants(n, delta, q, run.C_MS, run.R);
    C0 = std::stod(d.C0);
    C = std::exp2(d.C.exponent.to_double());
    const double log_crit = -(n / 2.0 * std::log(C0) + n * n / 2.0 * std::log(C));
    S1 = o.s1.value_or(std::exp(log_crit + std::log(kEpsilon1Safety)));
    std::cout << "C0 = " << d.C0 << ", C = 2^" << d.C.exponent.str() << ", S1 = " << S1 << '\n';
  } else {
    if (o.c0) C0 = *o.c0;
    if (o.c) C = *o.c;
    if (o.s1) S1 = *o.s1;
  }
  if (!(S1 > 0 && C0 > 0 && C > 0)) throw UsageError("S1, C0 and C must be positive");
  const RecursionResult r = recursion_simulate(S1, C0, C, n, o.steps);
  std::cout << "log(C0^{n/2} C^{n^2/2} S1) = " << r.log_product << '\n';
  std::cout << std::setw(6) << "index" << std::setw(24) << "log S" << std::setw(24) << "log bound" << '\n';
  for (const auto& s : r.steps)
    std::cout << std::setw(6) << s.odd_index << std::setw(24) << s.log_S << std::setw(24) << s.log_bound
              << (s.dominated ? "" : "  VIOLATION") << '\n';
  const Certificate c = recursion_certificate(r, n, S1, C0, C);
  return finish(c, o, run, o.out.empty() ? default_out("recursion-sim", n) : o.out);
}

int cmd_report(const Options& o) {
  Certificate c;
  try {
    c = read_certificate(o.report_path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  print_report(c, std::cout);
  return exit_code(c, o.strict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact certifier for the stability constant pipeline"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "certify one published row");
  add_common(verify, o, false);
  auto* n_opt = verify->add_option("dimension", o.n_positional, "dimension (3, 4 or 5)");
  verify->add_option("--n", o.n, "dimension")->excludes(n_opt);

  auto* all = app.add_subcommand("verify-all", "certify every row plus the exponent tables");
  add_common(all, o);

  auto* optimize = app.add_subcommand("optimize", "search for rows beyond the published ones");
  add_common(optimize, o);
  optimize->add_option("--objective", o.objective, "delta0 or epsilon");
  optimize->add_option("--delta0", o.delta0, "fixed delta0 for the epsilon objective");

  auto* rec = app.add_subcommand("recursion-sim", "iterate the De Giorgi recursion");
  add_common(rec, o);
  rec->add_option("--s1", o.s1, "S_1");
  rec->add_option("--c0", o.c0, "C_0");
  rec->add_option("--c", o.c, "C");
  rec->add_option("--q", o.q, "q, derive C_0 and C");
  rec->add_option("--delta", o.delta, "delta, derive C_0 and C");
  rec->add_option("--steps", o.steps, "number of odd steps");

  auto* report = app.add_subcommand("report", "render a stored certificate");
  report->add_option("certificate", o.report_path, "certificate path")->required();
  report->add_flag("--strict", o.strict, "exit 3 on discrepancies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(o);
    if (*all) return cmd_verify_all(o);
    if (*optimize) return cmd_optimize(o);
    if (*rec) return cmd_recursion(o);
    if (*report) return cmd_report(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
