#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/types.hpp"

#include <cstdint>

namespace kemeny::manifold {

/// The manifold of symmetrized reversible matrices with stationary pihat,
/// X = X^T, X pihat = pihat, X > 0 on the free pattern S and X equal to the
/// fixed part off S. Points and tangent vectors are plain dense matrices.
class ManifoldSpec {
 public:
  /// Throws infeasible when ||P^0 1||_inf = 1 (no point has X > 0 on S).
  ManifoldSpec(ReversibleChain chain, Pattern S);

  /// As above, with the off-diagonal pairs of `zeroed` held at zero instead of
  /// at P's entries. `zeroed` must not share an off-diagonal pair with S.
  ManifoldSpec(ReversibleChain chain, Pattern S, Pattern zeroed);

  const ReversibleChain& chain() const noexcept { return chain_; }
  const Pattern& pattern() const noexcept { return S_; }
  Index size() const noexcept { return chain_.size(); }
  const Vector& pi() const noexcept { return chain_.pi(); }
  const Vector& pi_hat() const noexcept { return chain_.pi_hat(); }
  /// 0/1 mask of S.
  const Matrix& mask() const noexcept { return mask_; }
  /// D_pihat P^0 D_pihat^{-1}: symmetrized entries of P outside S.
  const Matrix& fixed() const noexcept { return fixed_; }
  /// fixed() * pihat; the S-part must carry pihat - beta.
  const Vector& beta() const noexcept { return beta_; }
  /// Pairs forced to zero (self-pairs only when none).
  const Pattern& zeroed() const noexcept { return zeroed_; }
  /// Nonzero structure of the points: S plus the nonzero fixed entries.
  Pattern support() const;

  /// D_pihat M D_pihat^{-1}.
  Matrix symmetrize(const Matrix& M) const;
  /// D_pihat^{-1} X D_pihat.
  Matrix desymmetrize(const Matrix& X) const;

 private:
  ReversibleChain chain_;
  Pattern S_;
  Pattern zeroed_;
  Matrix mask_;
  Matrix fixed_;
  Vector beta_;
};

/// tr((I - X + pihat pihat^T)^{-1}) + 1/2 ||D_pihat^{-1} X D_pihat - P||_F^2.
double f_value(const Matrix& X, const ManifoldSpec& spec);

/// D_pi^{-1} X D_pi - D_pihat^{-1} P D_pihat + ((I - X + pihat pihat^T)^2)^{-T}.
Matrix euclidean_grad(const Matrix& X, const ManifoldSpec& spec);

/// f and its Euclidean gradient from a single factorization.
double f_and_euclidean_grad(const Matrix& X, const ManifoldSpec& spec, Matrix& grad);

/// sum over X_ij != 0 of xi_ij eta_ij / X_ij.
double inner(const Matrix& X, const Matrix& xi, const Matrix& eta);

/// Metric-orthogonal projection of an ambient Z onto the tangent space at X.
Matrix project(const Matrix& X, const Matrix& Z, const ManifoldSpec& spec);

/// project(X, Grad f o X).
Matrix riemannian_grad(const Matrix& X, const ManifoldSpec& spec);
Matrix riemannian_grad_from(const Matrix& X, const Matrix& egrad,
                            const ManifoldSpec& spec);

struct SinkhornOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

/// d > 0 with ||D A D pihat - (pihat - beta)||_inf <= tol, A symmetric,
/// nonnegative and strictly positive on S.
Vector sinkhorn_balance(const Matrix& A, const ManifoldSpec& spec,
                        const SinkhornOptions& opts = {});

inline constexpr double kClip = 1e-13;

/// X + xi when it stays positive on S, otherwise the S-part of X + xi is
/// clipped at kClip and rebalanced onto the manifold.
Matrix retract(const Matrix& X, const Matrix& xi, const ManifoldSpec& spec);

/// Re-impose exact symmetry and the fixed part and, when the relative drift
/// max_i |(X pihat - pihat)_i| / pihat_i exceeds `tol` (this is the row-sum
/// error of the desymmetrized chain), X pihat = pihat through a balancing
/// pass on the S-part.
Matrix restore(const Matrix& X, const ManifoldSpec& spec, double tol = 1e-14);

/// Largest t with X + t xi > 0 on S (infinity when xi >= 0 there).
double positivity_margin(const Matrix& X, const Matrix& xi, const ManifoldSpec& spec);

/// Completion midpoint, symmetrized, moved along a random tangent direction.
/// Deterministic per seed. Needs a spec without zeroed pairs.
Matrix random_point(const ManifoldSpec& spec, std::uint64_t seed);

/// Random tangent vector at X, deterministic per seed.
Matrix random_tangent(const Matrix& X, const ManifoldSpec& spec, std::uint64_t seed);

struct PointResiduals {
  double symmetry = 0.0;     ///< ||X - X^T||_max
  double stationarity = 0.0; ///< ||X pihat - pihat||_inf
  double fixed = 0.0;        ///< max |X - fixed| off S
  double min_on_pattern = 0.0;

  /// Largest equality residual.
  double max() const noexcept;
};

PointResiduals point_residuals(const Matrix& X, const ManifoldSpec& spec);

struct TangentResiduals {
  double symmetry = 0.0;
  double stationarity = 0.0;  ///< ||xi pihat||_inf
  double off_pattern = 0.0;

  double max() const noexcept;
};

TangentResiduals tangent_residuals(const Matrix& xi, const ManifoldSpec& spec);

}  // namespace kemeny::manifold
