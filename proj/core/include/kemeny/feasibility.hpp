#pragma once

#include "kemeny/chain.hpp"

#include <optional>
#include <utility>

namespace kemeny {

/// Metropolis-Hastings adjustment of a proposal Q toward target pi:
/// X_ij = Q_ij min{1, pi_j Q_ji / (pi_i Q_ij)} off the diagonal, diagonal
/// completes the row sums. Q must have a symmetric nonzero pattern.
Matrix metropolis_adjust(const Matrix& Q, const Vector& pi);

/// Reversible chain with stationary pi and exact pattern `pattern`, built from
/// the uniform proposal on the pattern's adjacency.
ReversibleChain metropolis_hastings(const Pattern& pattern, const Vector& pi);

/// P^0: entries of P on pairs outside S, zero on S.
Matrix fixed_entries(const ReversibleChain& chain, const Pattern& S);

/// Largest admissible completion weight, 1 - ||P^0 1||_inf.
double completion_delta_max(const ReversibleChain& chain, const Pattern& S);

/// A point of the feasible set: P's entries kept outside S, Metropolis-Hastings
/// weights scaled by delta on S, diagonal completing the rows. With no delta
/// the midpoint of [0, delta_max] is used, so the result is strictly positive
/// on S. Throws infeasible when delta_max is zero (the feasible set is {P}).
Matrix feasible_completion(const ReversibleChain& chain, const Pattern& S,
                           std::optional<double> delta = std::nullopt);

/// Admissible interval [-1, min_i P_ii / (1 - P_ii)] for theta_perturbation.
std::pair<double, double> theta_range(const ReversibleChain& chain);

/// P + theta (P - I).
Matrix theta_perturbation(const ReversibleChain& chain, double theta);

/// Common starting point for both solvers: P itself when P is strictly
/// positive on S, otherwise the best point of the segment from P to the
/// midpoint completion, sampled at halving step fractions.
Matrix interior_start(const ReversibleChain& chain, const Pattern& S);

}  // namespace kemeny
