#pragma once

#include <stdexcept>
#include <string>

namespace kemeny {

enum class ErrorKind {
  invalid_argument,
  not_irreducible,
  singular,
  not_converged,
  infeasible,
  bound_violation,
  parse,
  unsupported,
  resource_limit,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI) can map it to a diagnostic without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kemeny
