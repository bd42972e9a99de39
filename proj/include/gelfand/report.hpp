#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gelfand {

struct Violation {
  std::string check;
  std::string detail;
  std::vector<std::size_t> witness;  // basis / point indices, meaning depends on the check
};

/// Outcome of an exhaustive axiom check. Failures are data, not exceptions.
struct ValidationReport {
  std::vector<std::string> checks;
  std::vector<Violation> violations;

  static constexpr std::size_t kMaxPerCheck = 16;

  bool ok() const { return violations.empty(); }

  void ran(std::string name) {
    if (std::find(checks.begin(), checks.end(), name) == checks.end()) checks.push_back(std::move(name));
  }

  void fail(std::string check, std::string detail, std::vector<std::size_t> witness = {}) {
    ran(check);
    const auto n = std::count_if(violations.begin(), violations.end(),
                                 [&](const Violation& v) { return v.check == check; });
    if (static_cast<std::size_t>(n) >= kMaxPerCheck) return;
    violations.push_back({std::move(check), std::move(detail), std::move(witness)});
  }

  bool failed(std::string_view check) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.check == check; });
  }

  void merge(const ValidationReport& other, const std::string& prefix) {
    for (const auto& c : other.checks) ran(prefix + c);
    for (const auto& v : other.violations) violations.push_back({prefix + v.check, v.detail, v.witness});
  }

  std::string summary() const {
    if (ok()) return "ok";
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v.check + ": " + v.detail;
    }
    return s;
  }
};

}  // namespace gelfand
