#pragma once

// key = value configuration files and the run settings they feed.

#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stabcert/optimizer.hpp"
#include "stabcert/rational.hpp"
#include "stabcert/sampling.hpp"

namespace stabcert {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QDeltaPoint {
  int n;
  Rational q, delta;
};

struct RunConfig {
  double C_MS = 1.0;  // placeholder, not a physical value
  bool C_MS_set = false;
  double R = 1e6;
  Rational s{100}, s1{100};
  unsigned precision_digits = 50;
  std::size_t lemma32_samples = 100000;
  std::size_t barrier_samples = 1000;
  std::size_t quadform_samples = 10000;
  std::size_t linearity_samples = 100;
  std::uint64_t seed = 20240611;
  unsigned threads = default_threads();
  std::vector<QDeltaPoint> epsilon1_grid;  // empty: default grid
  std::string run_log;
  std::string source = "defaults";
};

struct ConfigLine {
  int line = 0;
  std::string key, value;
};

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<ConfigLine> parse_config_text(const std::string& text) {
  std::vector<ConfigLine> out;
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    ConfigLine cl{no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (cl.key.empty()) throw ConfigError("line " + std::to_string(no) + ": empty key");
    out.push_back(std::move(cl));
  }
  return out;
}

namespace detail {

inline double parse_double(const ConfigLine& l) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' expects a number");
  }
}

inline std::uint64_t parse_uint(const ConfigLine& l) {
  if (l.value.empty() || l.value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' expects a nonnegative integer");
  try {
    return std::stoull(l.value);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' out of range");
  }
}

inline Rational parse_rational(const ConfigLine& l, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' expects p/q");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

inline Range parse_range(const ConfigLine& l) {
  const auto parts = split(l.value, ',');
  if (parts.size() != 2) throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' expects lo, hi");
  const double lo = parse_double({l.line, l.key, parts[0]});
  const double hi = parse_double({l.line, l.key, parts[1]});
  if (!(lo > 0 && lo < hi)) throw ConfigError("line " + std::to_string(l.line) + ": '" + l.key + "' needs 0 < lo < hi");
  return {lo, hi};
}

}  // namespace detail

/// Applies config lines to both settings objects. Unknown keys are errors.
inline void apply_config(const std::vector<ConfigLine>& lines, RunConfig& run, SearchConfig& search) {
  using namespace detail;
  std::optional<Range> box_b, box_alpha, box_beta, box_L;
  for (const auto& l : lines) {
    const auto& k = l.key;
    if (k == "C_MS") {
      run.C_MS = parse_double(l);
      if (!(run.C_MS > 0)) throw ConfigError("C_MS must be positive");
      run.C_MS_set = true;
    } else if (k == "R") {
      run.R = parse_double(l);
      if (!(run.R > 1)) throw ConfigError("R must exceed 1");
    } else if (k == "s" || k == "s1") {
      const Rational v = parse_rational(l, l.value);
      if (v.sign() <= 0) throw ConfigError(k + " must be positive");
      (k == "s" ? run.s : run.s1) = v;
    } else if (k == "precision_digits") {
      const auto v = parse_uint(l);
      if (v < 50) throw ConfigError("precision_digits must be >= 50");
      run.precision_digits = static_cast<unsigned>(v);
    } else if (k == "lemma32_samples") {
      run.lemma32_samples = parse_uint(l);
    } else if (k == "barrier_samples") {
      run.barrier_samples = parse_uint(l);
    } else if (k == "quadform_samples") {
      run.quadform_samples = parse_uint(l);
    } else if (k == "linearity_samples") {
      run.linearity_samples = parse_uint(l);
    } else if (k == "seed") {
      run.seed = parse_uint(l);
    } else if (k == "threads") {
      const auto v = parse_uint(l);
      if (v == 0) throw ConfigError("threads must be >= 1");
      run.threads = search.threads = static_cast<unsigned>(v);
    } else if (k == "run_log") {
      run.run_log = l.value;
    } else if (k == "epsilon1_grid") {
      run.epsilon1_grid.clear();
      for (const auto& item : split(l.value, ';')) {
        const auto f = split(item, ':');
        if (f.size() != 3) throw ConfigError("epsilon1_grid entries are n:q:delta");
        const int n = static_cast<int>(parse_uint({l.line, k, f[0]}));
        if (n < 3) throw ConfigError("epsilon1_grid: n must be >= 3");
        run.epsilon1_grid.push_back({n, parse_rational(l, f[1]), parse_rational(l, f[2])});
      }
    } else if (k == "n") {
      const auto v = parse_uint(l);
      if (v < 3 || v > 64) throw ConfigError("n must be in 3..64");
      search.n = static_cast<int>(v);
    } else if (k == "objective") {
      if (l.value == "delta0")
        search.objective = Objective::minimize_delta0;
      else if (l.value == "epsilon")
        search.objective = Objective::maximize_epsilon;
      else
        throw ConfigError("objective must be delta0 or epsilon");
    } else if (k == "delta0") {
      const Rational v = parse_rational(l, l.value);
      if (v.sign() <= 0) throw ConfigError("delta0 must be positive");
      search.delta0_fixed = v;
    } else if (k == "budget") {
      search.budget = parse_uint(l);
      if (search.budget < 1) throw ConfigError("budget must be >= 1");
    } else if (k == "denominator_bound") {
      const auto v = parse_uint(l);
      if (v < 2 || v > static_cast<std::uint64_t>(std::numeric_limits<long>::max()))
        throw ConfigError("denominator_bound must be >= 2");
      search.denominator_bound = static_cast<std::int64_t>(v);
    } else if (k == "seeds") {
      search.seeds.clear();
      for (const auto& item : split(l.value, ',')) search.seeds.push_back(parse_uint({l.line, k, item}));
      if (search.seeds.empty()) throw ConfigError("seeds must not be empty");
    } else if (k == "max_bisection_steps") {
      search.max_bisection_steps = static_cast<int>(parse_uint(l));
    } else if (k == "box_b") {
      box_b = parse_range(l);
    } else if (k == "box_alpha") {
      box_alpha = parse_range(l);
    } else if (k == "box_beta") {
      box_beta = parse_range(l);
    } else if (k == "box_L") {
      box_L = parse_range(l);
    } else {
      throw ConfigError("line " + std::to_string(l.line) + ": unknown key '" + k + "'");
    }
  }
  if (box_b || box_alpha || box_beta || box_L) {
    SearchBox box = search.box.value_or(default_box(search.n));
    if (box_b) box.b = *box_b;
    if (box_alpha) box.alpha = *box_alpha;
    if (box_beta) box.beta = *box_beta;
    if (box_L) box.L = *box_L;
    search.box = box;
  }
}

inline void load_config_file(const std::string& path, RunConfig& run, SearchConfig& search) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config(parse_config_text(buf.str()), run, search);
  run.source = path;
}

}  // namespace stabcert
