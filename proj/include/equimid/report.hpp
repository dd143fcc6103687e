#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace equimid {

/// Outcome of one tested condition over a set of samples. `worst` is the
/// largest violation seen (0 when every sample satisfied the condition).
struct Condition {
  Condition() = default;
  explicit Condition(std::string condition_name) : name(std::move(condition_name)) {}

  std::string name;
  bool evaluated = true;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst = 0.0;
  std::string detail;

  bool passed() const { return evaluated && violations == 0; }

  /// `excess` > 0 means the sample violates the condition by that amount.
  void record(double excess) {
    ++samples;
    if (excess > 0.0 || excess != excess) ++violations;
    if (excess != excess) worst = excess;
    else worst = std::max(worst, excess);
  }
};

struct CheckReport {
  std::string name;
  std::vector<Condition> conditions;
  bool precondition_met = true;
  std::string note;

  bool passed() const {
    return precondition_met &&
           std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.passed(); });
  }

  const Condition* find(const std::string& condition) const {
    for (const auto& c : conditions)
      if (c.name == condition) return &c;
    return nullptr;
  }
};

}  // namespace equimid
