#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/types.hpp"

namespace kemeny {

/// Stationary distribution of an irreducible row-stochastic P.
///
/// Solved directly rather than iteratively: with h = 1/n, the left null
/// vector of I - P satisfies pi^T (I - P + 1 h^T) = h^T, so pi is a single
/// dense solve with the transposed shifted matrix. Throws not_irreducible if
/// the shifted matrix is singular or the solution is not strictly positive,
/// and not_converged if the fixed-point residual exceeds `tol`.
Vector stationary_distribution(const Matrix& P, double tol = 1e-12);

struct FundamentalMatrix {
  Matrix Z;  ///< (I - P + 1 h^T)^{-1}
  Vector h;
};

/// Throws singular (naming the smallest LU pivot) when I - P + 1 h^T is not
/// invertible, which for a stochastic P signals reducibility.
FundamentalMatrix fundamental_matrix(const Matrix& P, const Vector& h);

/// tr((I - P + 1 h^T)^{-1}) - 1. Independent of h as long as h^T 1 = 1.
double kemeny_trace(const Matrix& P, const Vector& h);

/// kemeny_trace with the uniform h = 1/n.
double kemeny_trace(const Matrix& P);

/// Sum of 1/(1 - lambda_i) over the spectrum without the unit eigenvalue,
/// using the symmetric eigensolver on D_pihat P D_pihat^{-1}.
double kemeny_eigen(const ReversibleChain& chain);

/// Mean first-passage times, T_ii = 0. Column j solves (I - P_{-j,-j}) t = 1
/// on the states other than j.
Matrix mean_first_passage(const Matrix& P);

/// sum_j (j-1) pi_(j) with pi sorted ascending; a lower bound on Kemeny's
/// constant over all chains with stationary vector pi.
double kirkland_lower_bound(const Vector& pi);

struct StructureMetrics {
  double stochasticity = 0.0;  ///< ||X 1 - 1||_inf
  double stationarity = 0.0;   ///< ||pi^T X - pi^T||_inf
  double reversibility = 0.0;  ///< ||D_pi X - X^T D_pi||_inf (max row sum)

  double max() const noexcept;
};

StructureMetrics check_structure(const Matrix& X, const Vector& pi);

/// tr((I - D_pihat X D_pihat^{-1} + pihat pihat^T)^{-1}) + 1/2 ||X - P||_F^2,
/// evaluated by LU so it is defined for any X near the feasible set.
double symmetrized_objective(const Matrix& X, const ReversibleChain& chain);

}  // namespace kemeny
