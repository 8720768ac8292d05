#pragma once

// Certificate record, JSON (schema_version "1") round trip, exit-code
// mapping and atomic file output.

#include <unistd.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iterator>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stabcert/constraint_report.hpp"

namespace stabcert {

using Json = nlohmann::ordered_json;
using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kSchemaVersion = "1";

struct ApproxValue {
  std::string value;
  unsigned digits = 12;
  bool operator==(const ApproxValue&) const = default;
};

struct PublishedTarget {
  std::string quantity;
  std::string quoted_value;
  std::string computed_value;
  bool match = false;
  bool operator==(const PublishedTarget&) const = default;
};

struct Section {
  std::string name;
  std::optional<int> n;
  KeyValues params;
  KeyValues values;
  std::vector<std::pair<std::string, ApproxValue>> approximate;
  std::vector<ConstraintEntry> checks;
  std::vector<PublishedTarget> published_targets;

  bool operator==(const Section&) const = default;

  void value(std::string key, std::string v) { values.emplace_back(std::move(key), std::move(v)); }
  void approx(std::string key, std::string v, unsigned digits = 12) {
    approximate.emplace_back(std::move(key), ApproxValue{std::move(v), digits});
  }
  void check(ConstraintEntry e) { checks.push_back(std::move(e)); }
  void checks_from(const ConstraintReport& r, const std::string& prefix = {}) {
    for (auto e : r.entries()) {
      e.name = prefix + e.name;
      checks.push_back(std::move(e));
    }
  }
  /// Adds the target and a matching check (pass, or discrepancy when they differ).
  void target(std::string quantity, std::string quoted, std::string computed) {
    const bool match = quoted == computed;
    checks.push_back({"published_" + quantity, CheckKind::exact, computed, std::nullopt,
                      match ? CheckStatus::pass : CheckStatus::discrepancy, "quoted " + quoted});
    published_targets.push_back({std::move(quantity), std::move(quoted), std::move(computed), match});
  }

  const std::string* find_value(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return &v;
    return nullptr;
  }
  const ConstraintEntry* find_check(const std::string& key) const {
    for (const auto& c : checks)
      if (c.name == key) return &c;
    return nullptr;
  }
};

struct Certificate {
  std::string schema_version = kSchemaVersion;
  std::string command;
  std::vector<Section> sections;
  std::vector<std::string> flags;
  KeyValues environment;

  bool operator==(const Certificate&) const = default;

  const Section* find_section(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }

  bool has_status(CheckStatus st) const {
    for (const auto& s : sections)
      for (const auto& c : s.checks)
        if (c.status == st) return true;
    return false;
  }
};

inline CheckKind check_kind_from(const std::string& s) {
  if (s == "exact") return CheckKind::exact;
  if (s == "sampled") return CheckKind::sampled;
  if (s == "approximate") return CheckKind::approximate;
  throw std::invalid_argument("unknown check kind '" + s + "'");
}

inline CheckStatus check_status_from(const std::string& s) {
  if (s == "pass") return CheckStatus::pass;
  if (s == "fail") return CheckStatus::fail;
  if (s == "discrepancy") return CheckStatus::discrepancy;
  if (s == "not_applicable") return CheckStatus::not_applicable;
  throw std::invalid_argument("unknown check status '" + s + "'");
}

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitDiscrepancy = 3, kExitUncertified = 4 };

/// Exit status as a pure function of the certificate.
inline int exit_code(const Certificate& c, bool strict) {
  if (c.command == "optimize") {
    const Section* s = c.find_section("search");
    const std::string* cert = s ? s->find_value("certified") : nullptr;
    if (!cert || *cert != "true") return kExitUncertified;
  }
  if (c.has_status(CheckStatus::fail)) return kExitFail;
  if (strict && c.has_status(CheckStatus::discrepancy)) return kExitDiscrepancy;
  return kExitPass;
}

inline std::string overall_status(const Certificate& c) {
  if (c.has_status(CheckStatus::fail)) return "fail";
  if (c.has_status(CheckStatus::discrepancy)) return "pass_with_discrepancies";
  return "pass";
}

namespace detail {
inline Json kv_to_json(const KeyValues& kv) {
  Json j = Json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}
inline KeyValues kv_from_json(const Json& j) {
  KeyValues kv;
  for (const auto& [k, v] : j.items()) kv.emplace_back(k, v.get<std::string>());
  return kv;
}
}  // namespace detail

inline Json to_json(const Certificate& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["command"] = c.command;
  j["status"] = overall_status(c);
  j["sections"] = Json::array();
  for (const auto& s : c.sections) {
    Json js;
    js["name"] = s.name;
    js["n"] = s.n ? Json(*s.n) : Json(nullptr);
    js["params"] = detail::kv_to_json(s.params);
    js["values"] = detail::kv_to_json(s.values);
    Json ap = Json::object();
    for (const auto& [k, v] : s.approximate) ap[k] = {{"value", v.value}, {"digits", v.digits}};
    js["approximate"] = ap;
    js["checks"] = Json::array();
    for (const auto& e : s.checks)
      js["checks"].push_back({{"name", e.name},
                              {"kind", std::string(to_string(e.kind))},
                              {"value", e.value},
                              {"margin", e.margin ? Json(e.margin->str()) : Json(nullptr)},
                              {"status", std::string(to_string(e.status))},
                              {"detail", e.detail}});
    js["published_targets"] = Json::array();
    for (const auto& t : s.published_targets)
      js["published_targets"].push_back({{"quantity", t.quantity},
                                         {"quoted_value", t.quoted_value},
                                         {"computed_value", t.computed_value},
                                         {"match", t.match}});
    j["sections"].push_back(std::move(js));
  }
  j["flags"] = c.flags;
  j["environment"] = detail::kv_to_json(c.environment);
  return j;
}

inline Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.schema_version = j.at("schema_version").get<std::string>();
  if (c.schema_version != kSchemaVersion)
    throw std::invalid_argument("unsupported schema_version '" + c.schema_version + "'");
  c.command = j.at("command").get<std::string>();
  for (const auto& js : j.at("sections")) {
    Section s;
    s.name = js.at("name").get<std::string>();
    if (!js.at("n").is_null()) s.n = js.at("n").get<int>();
    s.params = detail::kv_from_json(js.at("params"));
    s.values = detail::kv_from_json(js.at("values"));
    for (const auto& [k, v] : js.at("approximate").items())
      s.approximate.emplace_back(k, ApproxValue{v.at("value").get<std::string>(), v.at("digits").get<unsigned>()});
    for (const auto& e : js.at("checks")) {
      ConstraintEntry ce;
      ce.name = e.at("name").get<std::string>();
      ce.kind = check_kind_from(e.at("kind").get<std::string>());
      ce.value = e.at("value").get<std::string>();
      if (!e.at("margin").is_null()) ce.margin = Rational::parse(e.at("margin").get<std::string>());
      ce.status = check_status_from(e.at("status").get<std::string>());
      ce.detail = e.at("detail").get<std::string>();
      s.checks.push_back(std::move(ce));
    }
    for (const auto& t : js.at("published_targets"))
      s.published_targets.push_back({t.at("quantity").get<std::string>(), t.at("quoted_value").get<std::string>(),
                                     t.at("computed_value").get<std::string>(), t.at("match").get<bool>()});
    c.sections.push_back(std::move(s));
  }
  c.flags = j.at("flags").get<std::vector<std::string>>();
  c.environment = detail::kv_from_json(j.at("environment"));
  return c;
}

inline std::string serialize(const Certificate& c) { return to_json(c).dump(2) + "\n"; }

inline Certificate parse_certificate(const std::string& text) { return certificate_from_json(Json::parse(text)); }

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

inline Certificate read_certificate(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_certificate(text);
}

}  // namespace stabcert
