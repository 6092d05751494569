#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace opbench {

/// One named pass/fail line of a verification report.
struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct CheckList {
  std::vector<Check> checks;

  void add(std::string name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
  bool all_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace opbench
