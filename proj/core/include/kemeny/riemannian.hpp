#pragma once

#include "kemeny/manifold.hpp"
#include "kemeny/report.hpp"
#include "kemeny/types.hpp"

#include <functional>

namespace kemeny::riemannian {

/// One accepted step, as seen by SolverOptions::observer.
struct StepInfo {
  Index iter = 0;
  double f_prev = 0.0;
  double f = 0.0;
  double step = 0.0;
  /// <grad f, eta>_X at the previous iterate.
  double slope = 0.0;
  /// Reference value of the acceptance test (f_prev, or the window max for BB).
  double reference = 0.0;
  /// Accepted through the slope test phi'(t) <= c1 slope because the f
  /// decrease was below rounding level.
  bool certified = false;
  const Matrix* X = nullptr;
  const Matrix* X_prev = nullptr;
  /// Search direction eta at X_prev.
  const Matrix* direction = nullptr;
};

enum class CgRule {
  fletcher_reeves,
  /// Polak-Ribiere clipped to [-beta_FR, beta_FR].
  hybrid,
};

struct SolverOptions {
  double tol = 1e-8;  ///< on ||grad f||_X
  int max_iter = 5000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 50;
  /// CG restart period; 0 means the tangent-space dimension.
  Index cg_restart = 0;
  CgRule cg_rule = CgRule::fletcher_reeves;
  int bb_window = 10;
  double bb_min = 1e-10;
  double bb_max = 1e10;
  /// Fraction of the positivity margin allowed for the trial step.
  double margin_fraction = 0.9;
  std::function<void(const StepInfo&)> observer;

  void validate() const;
};

struct SolverResult {
  Matrix X;  ///< symmetrized final point
  Matrix P;  ///< D_pihat^{-1} X D_pihat
  double f = 0.0;
  double grad_norm = 0.0;
  OptimizationReport report;
};

/// Starting point shared with the constrained solver (P itself when strictly
/// positive on S), symmetrized.
Matrix default_start(const manifold::ManifoldSpec& spec);

/// Riemannian conjugate gradient, Fletcher-Reeves with restarts.
SolverResult riemannian_cg(const manifold::ManifoldSpec& spec, const Matrix& x0,
                           const SolverOptions& opts = {});

/// Barzilai-Borwein (BB1) gradient method with a non-monotone Armijo test.
SolverResult riemannian_bb(const manifold::ManifoldSpec& spec, const Matrix& x0,
                           const SolverOptions& opts = {});

/// BB1 step <s, s> / <s, y> clamped to [bb_min, bb_max]; when <s, y> <= 0
/// the steepest-descent scale 1 / ||grad f||_X.
double bb_step_length(double ss, double sy, double grad_norm, const SolverOptions& opts);

/// Dimension of the tangent space: number of off-diagonal pairs of S.
Index tangent_dimension(const manifold::ManifoldSpec& spec);

}  // namespace kemeny::riemannian
