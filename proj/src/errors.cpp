#include "campus/errors.hpp"

#include <algorithm>

namespace campus {

namespace {

std::string join_violations(const std::vector<RuleViolation>& violations) {
  std::string out = "world invariant violated:";
  for (const auto& v : violations) {
    out += "\n  [" + v.rule + "] " + v.path + ": " + v.message;
  }
  return out;
}

}  // namespace

InvariantError::InvariantError(std::vector<RuleViolation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

bool InvariantError::violates(std::string_view rule) const {
  return std::any_of(violations_.begin(), violations_.end(),
                     [&](const RuleViolation& v) { return v.rule == rule; });
}

}  // namespace campus
