#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stabcert/rational.hpp"

namespace stabcert {

enum class CheckKind { exact, sampled, approximate };
enum class CheckStatus { pass, fail, discrepancy, not_applicable };

inline std::string_view to_string(CheckKind k) {
  switch (k) {
    case CheckKind::exact: return "exact";
    case CheckKind::sampled: return "sampled";
    case CheckKind::approximate: return "approximate";
  }
  return "?";
}

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::discrepancy: return "discrepancy";
    case CheckStatus::not_applicable: return "not_applicable";
  }
  return "?";
}

struct ConstraintEntry {
  std::string name;
  CheckKind kind = CheckKind::exact;
  std::string value;               // margin, residual or summary, as text
  std::optional<Rational> margin;  // exact margin when one exists
  CheckStatus status = CheckStatus::pass;
  std::string detail;

  bool operator==(const ConstraintEntry&) const = default;
};

/// Named list of constraint margins. A margin passes when strictly positive,
/// or when nonnegative for constraints registered with `allow_zero`.
class ConstraintReport {
 public:
  void add_margin(std::string name, const Rational& margin, bool allow_zero = false, std::string detail = {}) {
    const bool ok = allow_zero ? margin.sign() >= 0 : margin.sign() > 0;
    entries_.push_back({std::move(name), CheckKind::exact, margin.str(), margin,
                        ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
  }

  void add_not_applicable(std::string name, std::string detail) {
    entries_.push_back({std::move(name), CheckKind::exact, "", std::nullopt, CheckStatus::not_applicable,
                        std::move(detail)});
  }

  void add(ConstraintEntry entry) { entries_.push_back(std::move(entry)); }

  void append(const ConstraintReport& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

  const std::vector<ConstraintEntry>& entries() const { return entries_; }

  const ConstraintEntry* find(std::string_view name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
    return it == entries_.end() ? nullptr : &*it;
  }

  bool all_pass() const {
    return std::none_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.status == CheckStatus::fail; });
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.status == CheckStatus::fail) out.push_back(e.name);
    return out;
  }

  bool operator==(const ConstraintReport&) const = default;

 private:
  std::vector<ConstraintEntry> entries_;
};

}  // namespace stabcert
