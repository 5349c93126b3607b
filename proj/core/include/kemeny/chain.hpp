#pragma once

#include "kemeny/pattern.hpp"
#include "kemeny/types.hpp"

namespace kemeny {

/// A validated reversible Markov chain: row-stochastic P, positive stationary
/// distribution pi satisfying detailed balance, and the pattern of P (its
/// nonzeros plus every self-pair). Immutable after construction.
class ReversibleChain {
 public:
  /// Pattern is taken from the nonzeros of P.
  ReversibleChain(Matrix P, Vector pi);

  /// P must respect `pattern`; the pattern must be irreducible.
  ReversibleChain(Matrix P, Vector pi, Pattern pattern);

  /// Computes pi with stationary_distribution() and validates reversibility.
  static ReversibleChain from_transition(Matrix P);

  const Matrix& P() const noexcept { return P_; }
  const Vector& pi() const noexcept { return pi_; }
  /// Componentwise square root of pi.
  const Vector& pi_hat() const noexcept { return pi_hat_; }
  const Pattern& pattern() const noexcept { return pattern_; }
  Index size() const noexcept { return P_.rows(); }

  /// D_pihat P D_pihat^{-1}; symmetric for a reversible chain.
  Matrix symmetrized() const;

 private:
  void validate() const;

  Matrix P_;
  Vector pi_;
  Vector pi_hat_;
  Pattern pattern_;
};

/// Throws unless pi is a strictly positive probability vector (to
/// kStructureTolerance).
void validate_distribution(const Vector& pi);

}  // namespace kemeny
