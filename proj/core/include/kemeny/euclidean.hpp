#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/report.hpp"
#include "kemeny/types.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <vector>

namespace kemeny::ipm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coordinate-format perturbation: one value per ordered pair (i, j) with
/// {i, j} in S, stored column-major (by j, then i), so the order matches
/// vec() of the dense matrix.
struct CoordinateVariable {
  Index n = 0;
  std::vector<Index> rows;
  std::vector<Index> cols;
  Vector values;

  static CoordinateVariable zeros(const Pattern& S);
  /// vec(r, c, M): the stored entries of M.
  static CoordinateVariable gather(const Pattern& S, const Matrix& M);

  Index size() const noexcept { return values.size(); }
  /// Same coordinates, all values zero.
  CoordinateVariable zeros_like() const;
  /// mat(r, c, values).
  Matrix to_matrix() const;
  /// vec(r, c, M) on this variable's coordinates.
  Vector gather(const Matrix& M) const;
};

/// perm with (T v)[p] = v[perm[p]], i.e. T vec(M) = vec(M^T) for n x n M.
std::vector<Index> build_commutation(Index n);
SparseMatrix commutation_matrix(Index n);

/// Equality-constrained form restricted to the stored coordinates.
struct VectorizedProblem {
  CoordinateVariable layout;  ///< coordinates; values hold P on them
  SparseMatrix A;             ///< (n + n^2) x m
  Vector b;                   ///< zeros
  Vector lower;               ///< -vec(r, c, P)
  SparseMatrix selection;     ///< Gamma, m x n^2
  /// m x k basis of ker A, one column per off-diagonal pair {i < j} of S in
  /// off_diagonal_pairs() order. Column {i, j} is the perturbation whose
  /// symmetrized form is e_i e_j^T + e_j e_i^T - (diagonal repair).
  SparseMatrix nullspace;
  std::vector<IndexPair> pairs;

  Index n() const noexcept { return layout.n; }
  Index m() const noexcept { return layout.size(); }
};

VectorizedProblem build_constraints(const ReversibleChain& chain,
                                    const Pattern& S);

struct ObjectiveGradient {
  double value = 0.0;
  Vector gradient;  ///< length m
};

/// g(delta) = tr(H_s^{-1}) + 1/2 ||delta||^2 with
/// H_s = I - D_pihat (P + Delta) D_pihat^{-1} + pihat pihat^T, and its
/// gradient Pi o (H_s^{-2})^T + delta on the stored coordinates.
ObjectiveGradient objective_and_gradient(const CoordinateVariable& delta,
                                         const ReversibleChain& chain);

inline constexpr Index kDefaultHessianCap = 4000;

/// Dense m x m Hessian of g. Throws resource_limit when m > cap.
Matrix hessian(const CoordinateVariable& delta, const ReversibleChain& chain,
               Index cap = kDefaultHessianCap);

enum class HessianMode { automatic, exact, secant };

struct IpmOptions {
  double mu0 = 1.0;
  double mu_shrink = 0.1;
  double inner_tol = 1e-8;
  double mu_final = 1e-9;
  int max_outer = 12;
  int max_inner = 100;
  /// Iteration cap per barrier stage in secant mode.
  int max_inner_secant = 2000;
  int lbfgs_memory = 12;
  HessianMode hessian_mode = HessianMode::automatic;
  Index hessian_cap = kDefaultHessianCap;
  double fraction_to_boundary = 0.995;
  double armijo = 1e-4;
  int max_backtracks = 60;
  /// Skip the barrier and return P when Delta = 0 already satisfies the KKT
  /// conditions to inner_tol.
  bool kkt_precheck = true;
  /// Called with delta after every accepted step.
  std::function<void(const Vector&)> observer;

  void validate() const;
};

struct IpmResult {
  Matrix X;
  OptimizationReport report;
  int outer_iterations = 0;
  int inner_iterations = 0;
  /// g at the end of each barrier stage.
  std::vector<double> stage_objectives;
  /// ||N^T (grad g - lambda)||_inf / (1 + ||N^T grad g||_inf), lambda = mu / s.
  double kkt_residual = 0.0;
  bool used_secant = false;
};

IpmResult solve_constrained(const ReversibleChain& chain, const Pattern& S,
                            const IpmOptions& opts = {});

/// Nonnegative least squares min ||C x - d||, x >= 0 (Lawson-Hanson).
Vector nnls(const Matrix& C, const Vector& d, int max_iter = 0);

}  // namespace kemeny::ipm
