#include "kemeny/chain.hpp"

#include "kemeny/error.hpp"
#include "kemeny/kemeny.hpp"

#include <cmath>
#include <sstream>

namespace kemeny {

namespace {

std::string fmt_residual(const char* what, double value) {
  std::ostringstream os;
  os << what << " residual " << value << " exceeds " << kStructureTolerance;
  return os.str();
}

}  // namespace

void validate_distribution(const Vector& pi) {
  if (pi.size() == 0) {
    throw Error(ErrorKind::invalid_argument, "empty distribution");
  }
  for (Index i = 0; i < pi.size(); ++i) {
    if (!(pi(i) > 0.0) || !std::isfinite(pi(i))) {
      throw Error(ErrorKind::invalid_argument,
                  "distribution entry " + std::to_string(i) +
                      " is not strictly positive");
    }
  }
  if (std::abs(pi.sum() - 1.0) > kStructureTolerance) {
    throw Error(ErrorKind::invalid_argument,
                fmt_residual("distribution sum", std::abs(pi.sum() - 1.0)));
  }
}

ReversibleChain::ReversibleChain(Matrix P, Vector pi)
    : ReversibleChain(P, std::move(pi), Pattern::from_matrix(P)) {}

ReversibleChain::ReversibleChain(Matrix P, Vector pi, Pattern pattern)
    : P_(std::move(P)), pi_(std::move(pi)), pattern_(std::move(pattern)) {
  validate();
  pi_hat_ = pi_.cwiseSqrt();
}

ReversibleChain ReversibleChain::from_transition(Matrix P) {
  Vector pi = stationary_distribution(P);
  return ReversibleChain(std::move(P), std::move(pi));
}

Matrix ReversibleChain::symmetrized() const {
  return pi_hat_.asDiagonal() * P_ * pi_hat_.cwiseInverse().asDiagonal();
}

void ReversibleChain::validate() const {
  const Index n = P_.rows();
  if (n == 0 || P_.cols() != n) {
    throw Error(ErrorKind::invalid_argument, "transition matrix must be square");
  }
  if (pi_.size() != n || pattern_.size() != n) {
    throw Error(ErrorKind::invalid_argument, "dimension mismatch");
  }
  if (!P_.allFinite() || (P_.array() < 0.0).any()) {
    throw Error(ErrorKind::invalid_argument,
                "transition matrix must be finite and nonnegative");
  }
  validate_distribution(pi_);
  const StructureMetrics m = check_structure(P_, pi_);
  if (m.stochasticity > kStructureTolerance) {
    throw Error(ErrorKind::invalid_argument,
                fmt_residual("row-sum", m.stochasticity));
  }
  if (m.reversibility > kStructureTolerance) {
    throw Error(ErrorKind::invalid_argument,
                fmt_residual("detailed-balance", m.reversibility));
  }
  if (!respects_pattern(P_, pattern_)) {
    throw Error(ErrorKind::invalid_argument,
                "transition matrix has nonzeros outside its pattern");
  }
  if (!check_irreducible(pattern_)) {
    throw Error(ErrorKind::not_irreducible, "chain pattern is reducible");
  }
  if (!check_irreducible(Pattern::from_matrix(P_))) {
    throw Error(ErrorKind::not_irreducible, "transition matrix is reducible");
  }
}

}  // namespace kemeny
