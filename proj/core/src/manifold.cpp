#include "kemeny/manifold.hpp"

#include "kemeny/error.hpp"
#include "kemeny/feasibility.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kemeny::manifold {

namespace {

Matrix symmetric_part(const Matrix& M) { return 0.5 * (M + M.transpose()); }

Eigen::LLT<Matrix> factor_shift(const Matrix& X, const Vector& ph) {
  const Index n = X.rows();
  const Matrix W = Matrix::Identity(n, n) - symmetric_part(X) + ph * ph.transpose();
  Eigen::LLT<Matrix> llt(W);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::singular,
                "I - X + pihat pihat^T is not positive definite: X is off the manifold");
  }
  return llt;
}

// F(d) = D A D pihat - t.
Vector balance_residual(const Matrix& A, const Vector& d, const Vector& ph,
                        const Vector& t) {
  return d.cwiseProduct(A * d.cwiseProduct(ph)) - t;
}

}  // namespace

// --- spec -----------------------------------------------------------------

ManifoldSpec::ManifoldSpec(ReversibleChain chain, Pattern S)
    : ManifoldSpec(std::move(chain), std::move(S), Pattern()) {}

ManifoldSpec::ManifoldSpec(ReversibleChain chain, Pattern S, Pattern zeroed)
    : chain_(std::move(chain)), S_(std::move(S)), zeroed_(std::move(zeroed)) {
  const Index n = chain_.size();
  if (zeroed_.size() == 0) zeroed_ = Pattern(n);
  if (S_.size() != n || zeroed_.size() != n) {
    throw Error(ErrorKind::invalid_argument, "pattern and chain sizes differ");
  }
  Matrix P0 = fixed_entries(chain_, S_);
  for (const auto& [i, j] : zeroed_.off_diagonal_pairs()) {
    if (S_.contains(i, j)) {
      throw Error(ErrorKind::invalid_argument, "zeroed pairs overlap the free pattern");
    }
    P0(i, j) = 0.0;
    P0(j, i) = 0.0;
  }
  if (1.0 - P0.rowwise().sum().maxCoeff() <= 1e-14) {
    throw Error(ErrorKind::infeasible,
                "degenerate feasible set: ||P^0 1||_inf = 1, so it consists only of "
                "the matrix P and the manifold is empty");
  }
  mask_ = S_.mask();
  fixed_ = symmetric_part(symmetrize(P0));
  beta_ = fixed_ * pi_hat();
}

Pattern ManifoldSpec::support() const {
  return pattern_union(S_, Pattern::from_matrix(fixed_));
}

Matrix ManifoldSpec::symmetrize(const Matrix& M) const {
  return pi_hat().asDiagonal() * M * pi_hat().cwiseInverse().asDiagonal();
}

Matrix ManifoldSpec::desymmetrize(const Matrix& X) const {
  return pi_hat().cwiseInverse().asDiagonal() * X * pi_hat().asDiagonal();
}

// --- objective ----------------------------------------------------------------

double f_value(const Matrix& X, const ManifoldSpec& spec) {
  const Index n = spec.size();
  const Eigen::LLT<Matrix> llt = factor_shift(X, spec.pi_hat());
  const Matrix Winv = llt.solve(Matrix::Identity(n, n));
  return Winv.trace() + 0.5 * (spec.desymmetrize(X) - spec.chain().P()).squaredNorm();
}

double f_and_euclidean_grad(const Matrix& X, const ManifoldSpec& spec, Matrix& grad) {
  const Index n = spec.size();
  const Vector& ph = spec.pi_hat();
  const Vector& pi = spec.pi();
  const Eigen::LLT<Matrix> llt = factor_shift(X, ph);
  const Matrix Winv = llt.solve(Matrix::Identity(n, n));
  const Matrix& P = spec.chain().P();
  grad = pi.cwiseInverse().asDiagonal() * X * pi.asDiagonal() -
         ph.cwiseInverse().asDiagonal() * P * ph.asDiagonal() +
         (Winv * Winv).transpose();
  return Winv.trace() + 0.5 * (spec.desymmetrize(X) - P).squaredNorm();
}

Matrix euclidean_grad(const Matrix& X, const ManifoldSpec& spec) {
  Matrix g;
  f_and_euclidean_grad(X, spec, g);
  return g;
}

// --- metric and projection -------------------------------------------------------

double inner(const Matrix& X, const Matrix& xi, const Matrix& eta) {
  double s = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      if (X(i, j) != 0.0) s += xi(i, j) * eta(i, j) / X(i, j);
    }
  }
  return s;
}

Matrix project(const Matrix& X, const Matrix& Z, const ManifoldSpec& spec) {
  const Vector& ph = spec.pi_hat();
  const Matrix XS = X.cwiseProduct(spec.mask());
  const Matrix Zs = symmetric_part(Z).cwiseProduct(spec.mask());
  Matrix M = ph.asDiagonal() * XS * ph.asDiagonal();
  M.diagonal() += XS * spec.pi();
  const Vector rhs = Zs * ph;
  Eigen::LLT<Matrix> llt(symmetric_part(M));
  Vector alpha;
  if (llt.info() == Eigen::Success) {
    alpha = llt.solve(rhs);
  } else {
    Eigen::PartialPivLU<Matrix> lu(M);
    alpha = lu.solve(rhs);
    if (!alpha.allFinite()) {
      throw Error(ErrorKind::singular,
                  "projection system is singular: X is off the manifold");
    }
  }
  const Matrix normal = (alpha * ph.transpose() + ph * alpha.transpose()).cwiseProduct(XS);
  return symmetric_part(Zs - normal);
}

Matrix riemannian_grad_from(const Matrix& X, const Matrix& egrad,
                            const ManifoldSpec& spec) {
  return project(X, egrad.cwiseProduct(X), spec);
}

Matrix riemannian_grad(const Matrix& X, const ManifoldSpec& spec) {
  return riemannian_grad_from(X, euclidean_grad(X, spec), spec);
}

// --- balancing and retraction -------------------------------------------------------

Vector sinkhorn_balance(const Matrix& A, const ManifoldSpec& spec,
                        const SinkhornOptions& opts) {
  const Index n = spec.size();
  const Vector& ph = spec.pi_hat();
  const Vector t = ph - spec.beta();
  if ((t.array() <= 0.0).any()) {
    throw Error(ErrorKind::infeasible, "balancing target pihat - beta is not positive");
  }
  if (A.rows() != n || A.cols() != n || (A.array() < 0.0).any()) {
    throw Error(ErrorKind::invalid_argument, "balancing needs a nonnegative n x n matrix");
  }
  const Matrix& mask = spec.mask();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (mask(i, j) != 0.0 && !(A(i, j) > 0.0)) {
        throw Error(ErrorKind::invalid_argument,
                    "balancing needs A strictly positive on the pattern");
      }
    }
  }

  Vector d = t.cwiseQuotient(A * ph).cwiseSqrt();
  Vector F = balance_residual(A, d, ph, t);
  double res = F.lpNorm<Eigen::Infinity>();
  int iter = 0;

  // F = 0 is the stationarity condition of the convex
  //   phi(u) = 1/2 w^T A w - sum_i t_i pihat_i u_i,  w = pihat o exp(u),
  // (grad phi = pihat o F), so damped Newton in u = log d converges from any
  // start and is indifferent to badly scaled solutions (tiny clipped entries).
  const auto phi = [&](const Vector& u) {
    const Vector w = ph.cwiseProduct(u.array().exp().matrix());
    return 0.5 * w.dot(A * w) - t.cwiseProduct(ph).dot(u);
  };
  constexpr int kNewtonSteps = 100;
  Vector u = d.array().log().matrix();
  double phi_u = phi(u);
  for (; iter < std::min(opts.max_iter, kNewtonSteps) && res > 0.0; ++iter) {
    const Vector w = ph.cwiseProduct(d);
    const Vector Aw = A * w;
    Matrix H = w.asDiagonal() * A * w.asDiagonal();
    H.diagonal() += w.cwiseProduct(Aw);
    const Vector grad = ph.cwiseProduct(F);
    const Vector step = -Eigen::LDLT<Matrix>(H).solve(grad);
    if (!step.allFinite()) break;
    const double slope = grad.dot(step);
    if (!(slope < 0.0)) break;
    double a = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, a *= 0.5) {
      const Vector trial = u + a * step;
      const double pt = phi(trial);
      const Vector dt = trial.array().exp().matrix();
      const Vector Ft = balance_residual(A, dt, ph, t);
      const double rt = Ft.lpNorm<Eigen::Infinity>();
      // Armijo on phi until the tolerance is met, then polish down to the
      // rounding floor on the residual alone.
      const bool descent = res > opts.tol && pt <= phi_u + 1e-4 * a * slope;
      if (descent || rt < (res > opts.tol ? 0.5 : 1.0) * res) {
        u = trial;
        phi_u = pt;
        d = dt;
        F = Ft;
        res = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  // Damped symmetric fixed-point iteration for whatever Newton left over.
  for (; iter < opts.max_iter && res > opts.tol; ++iter) {
    const Vector DAd = d.cwiseProduct(A * d.cwiseProduct(ph));
    d = d.cwiseProduct(t.cwiseQuotient(DAd).cwiseSqrt());
    res = balance_residual(A, d, ph, t).lpNorm<Eigen::Infinity>();
  }
  if (res > opts.tol) {
    std::ostringstream os;
    os << "balancing did not converge: residual " << res << " after " << iter
       << " iterations";
    throw Error(ErrorKind::not_converged, os.str());
  }
  return d;
}

namespace {

Matrix rebalance(const Matrix& S_part, const ManifoldSpec& spec) {
  const Vector d = sinkhorn_balance(S_part, spec);
  const Matrix DAD = d.asDiagonal() * S_part * d.asDiagonal();
  return spec.fixed() + symmetric_part(DAD).cwiseProduct(spec.mask());
}

}  // namespace

Matrix retract(const Matrix& X, const Matrix& xi, const ManifoldSpec& spec) {
  const Matrix Y = symmetric_part(X + xi);
  const Matrix& mask = spec.mask();
  bool positive = true;
  for (Index j = 0; j < Y.cols() && positive; ++j) {
    for (Index i = 0; i < Y.rows(); ++i) {
      if (mask(i, j) != 0.0 && !(Y(i, j) > 0.0)) {
        positive = false;
        break;
      }
    }
  }
  if (positive) return Y;
  Matrix A = Y.cwiseProduct(mask);
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      if (mask(i, j) != 0.0) A(i, j) = std::max(A(i, j), kClip);
    }
  }
  return rebalance(A, spec);
}

Matrix restore(const Matrix& X, const ManifoldSpec& spec, double tol) {
  Matrix Y = spec.fixed() + symmetric_part(X).cwiseProduct(spec.mask());
  const double drift = (Y * spec.pi_hat() - spec.pi_hat())
                           .cwiseQuotient(spec.pi_hat())
                           .lpNorm<Eigen::Infinity>();
  if (drift <= tol) return Y;
  return rebalance(Y.cwiseProduct(spec.mask()), spec);
}

double positivity_margin(const Matrix& X, const Matrix& xi, const ManifoldSpec& spec) {
  double t = std::numeric_limits<double>::infinity();
  const Matrix& mask = spec.mask();
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      if (mask(i, j) != 0.0 && xi(i, j) < 0.0) t = std::min(t, -X(i, j) / xi(i, j));
    }
  }
  return t;
}

Matrix random_tangent(const Matrix& X, const ManifoldSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Index n = spec.size();
  Matrix Z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) Z(i, j) = g(rng);
  }
  return project(X, Z.cwiseProduct(X.cwiseAbs()), spec);
}

Matrix random_point(const ManifoldSpec& spec, std::uint64_t seed) {
  if (spec.zeroed().off_diagonal_count() != 0) {
    throw Error(ErrorKind::invalid_argument, "random_point needs a spec without zeroed pairs");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double dmax = completion_delta_max(spec.chain(), spec.pattern());
  const Matrix X0 = restore(
      spec.symmetrize(feasible_completion(spec.chain(), spec.pattern(), u(rng) * dmax)),
      spec);
  const Matrix xi = random_tangent(X0, spec, rng());
  const double margin = positivity_margin(X0, xi, spec);
  const double scale = std::isfinite(margin) ? u(rng) * margin : u(rng);
  return restore(retract(X0, scale * xi, spec), spec);
}

// --- residuals ----------------------------------------------------------------------

double PointResiduals::max() const noexcept {
  return std::max({symmetry, stationarity, fixed});
}

PointResiduals point_residuals(const Matrix& X, const ManifoldSpec& spec) {
  PointResiduals r;
  r.symmetry = (X - X.transpose()).cwiseAbs().maxCoeff();
  r.stationarity = (X * spec.pi_hat() - spec.pi_hat()).lpNorm<Eigen::Infinity>();
  const Matrix& mask = spec.mask();
  r.min_on_pattern = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      if (mask(i, j) != 0.0) {
        r.min_on_pattern = std::min(r.min_on_pattern, X(i, j));
      } else {
        r.fixed = std::max(r.fixed, std::abs(X(i, j) - spec.fixed()(i, j)));
      }
    }
  }
  return r;
}

double TangentResiduals::max() const noexcept {
  return std::max({symmetry, stationarity, off_pattern});
}

TangentResiduals tangent_residuals(const Matrix& xi, const ManifoldSpec& spec) {
  TangentResiduals r;
  r.symmetry = (xi - xi.transpose()).cwiseAbs().maxCoeff();
  r.stationarity = (xi * spec.pi_hat()).lpNorm<Eigen::Infinity>();
  const Matrix off = xi.cwiseProduct(Matrix::Ones(xi.rows(), xi.cols()) - spec.mask());
  r.off_pattern = off.cwiseAbs().maxCoeff();
  return r;
}

}  // namespace kemeny::manifold
