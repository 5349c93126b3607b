#include "kemeny/error.hpp"
#include "kemeny/types.hpp"

namespace kemeny {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_irreducible: return "not_irreducible";
    case ErrorKind::singular: return "singular";
    case ErrorKind::not_converged: return "not_converged";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::bound_violation: return "bound_violation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::resource_limit: return "resource_limit";
  }
  return "unknown";
}

const char* to_string(ExitReason reason) noexcept {
  switch (reason) {
    case ExitReason::converged: return "converged";
    case ExitReason::max_iterations: return "max_iterations";
    case ExitReason::stagnated: return "stagnated";
  }
  return "unknown";
}

}  // namespace kemeny
