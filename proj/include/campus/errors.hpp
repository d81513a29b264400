#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace campus {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (wrong types, missing keys).
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct RuleViolation {
  std::string rule;  // stable rule name, e.g. "building-count"
  std::string path;  // offending document path, e.g. "buildings[3].entrance_node"
  std::string message;
};

// Well-formed document that breaks a domain invariant. Carries every violation found.
class InvariantError : public Error {
 public:
  explicit InvariantError(std::vector<RuleViolation> violations);
  const std::vector<RuleViolation>& violations() const noexcept { return violations_; }
  bool violates(std::string_view rule) const;

 private:
  std::vector<RuleViolation> violations_;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

// Action not permitted in the current stage or position. `constraint` names the rule.
class IllegalActionError : public Error {
 public:
  IllegalActionError(std::string constraint, const std::string& detail)
      : Error("illegal action (" + constraint + "): " + detail), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

}  // namespace campus
