#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfj {

/// Coarse failure classes. The CLI maps each one to its own exit code.
enum class ErrorCategory {
  parse,
  validation,
  io,
  budget,
  solver,
  dimension,
  range,
};

constexpr std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::io: return "io";
    case ErrorCategory::budget: return "budget";
    case ErrorCategory::solver: return "solver";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::range: return "range";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Raised when a value violates one or more invariants. Every violation found
/// is kept, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(ErrorCategory::validation, join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid input:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace cfj
