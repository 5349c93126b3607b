#include "kemeny/kemeny.hpp"

#include "kemeny/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace kemeny {

namespace {

void require_square(const Matrix& P) {
  if (P.rows() == 0 || P.rows() != P.cols()) {
    throw Error(ErrorKind::invalid_argument, "matrix must be square and non-empty");
  }
}

Matrix shifted(const Matrix& P, const Vector& h) {
  const Index n = P.rows();
  return Matrix::Identity(n, n) - P + Vector::Ones(n) * h.transpose();
}

// Smallest |U_ii| of a partial-pivot LU, used as the singularity witness.
double smallest_pivot(const Eigen::PartialPivLU<Matrix>& lu, Index* where) {
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  Index k = 0;
  const double v = diag.minCoeff(&k);
  if (where != nullptr) *where = k;
  return v;
}

constexpr double kPivotFloor = 1e-13;

}  // namespace

Vector stationary_distribution(const Matrix& P, double tol) {
  require_square(P);
  const Index n = P.rows();
  const Vector h = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Matrix M = shifted(P, h);
  Eigen::FullPivLU<Matrix> lu(M.transpose());
  lu.setThreshold(kPivotFloor);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::not_irreducible,
                "I - P + 1h^T is singular (rank " + std::to_string(lu.rank()) +
                    " of " + std::to_string(n) +
                    "); the chain has no unique stationary distribution");
  }
  Vector pi = lu.solve(h);
  pi /= pi.sum();
  for (Index i = 0; i < n; ++i) {
    if (!(pi(i) > 0.0)) {
      throw Error(ErrorKind::not_irreducible,
                  "stationary vector has a non-positive entry at state " +
                      std::to_string(i) + "; the chain is reducible");
    }
  }
  const double residual =
      (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > tol) {
    std::ostringstream os;
    os << "stationary solve residual " << residual << " above tolerance " << tol;
    throw Error(ErrorKind::not_converged, os.str());
  }
  return pi;
}

FundamentalMatrix fundamental_matrix(const Matrix& P, const Vector& h) {
  require_square(P);
  if (h.size() != P.rows()) {
    throw Error(ErrorKind::invalid_argument, "h has the wrong length");
  }
  if (std::abs(h.sum() - 1.0) > kStructureTolerance) {
    throw Error(ErrorKind::invalid_argument, "h must satisfy h^T 1 = 1");
  }
  const Matrix M = shifted(P, h);
  Eigen::PartialPivLU<Matrix> lu(M);
  Index where = 0;
  const double pivot = smallest_pivot(lu, &where);
  const double scale = std::max(1.0, M.cwiseAbs().rowwise().sum().maxCoeff());
  if (!(pivot > kPivotFloor * scale)) {
    std::ostringstream os;
    os << "I - P + 1h^T is singular: smallest pivot " << pivot << " at step "
       << where << " (the chain is likely reducible)";
    throw Error(ErrorKind::singular, os.str());
  }
  return {lu.inverse(), h};
}

double kemeny_trace(const Matrix& P, const Vector& h) {
  return fundamental_matrix(P, h).Z.trace() - 1.0;
}

double kemeny_trace(const Matrix& P) {
  require_square(P);
  const Index n = P.rows();
  return kemeny_trace(P, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

double kemeny_eigen(const ReversibleChain& chain) {
  Matrix S = chain.symmetrized();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::not_converged, "symmetric eigensolver failed");
  }
  const Vector& lambda = eig.eigenvalues();  // ascending
  const Index n = lambda.size();
  constexpr double kUnitGap = 1e-12;
  Index near_one = 0;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(lambda(i) - 1.0) <= kUnitGap) ++near_one;
  }
  if (near_one > 1) {
    throw Error(ErrorKind::not_irreducible,
                std::to_string(near_one) +
                    " eigenvalues coincide with 1; the chain is reducible");
  }
  double k = 0.0;
  for (Index i = 0; i + 1 < n; ++i) k += 1.0 / (1.0 - lambda(i));
  return k;
}

Matrix mean_first_passage(const Matrix& P) {
  require_square(P);
  const Index n = P.rows();
  Matrix T = Matrix::Zero(n, n);
  if (n == 1) return T;
  for (Index j = 0; j < n; ++j) {
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
      if (i != j) keep.push_back(i);
    }
    const Index r = n - 1;
    Matrix M(r, r);
    for (Index a = 0; a < r; ++a) {
      for (Index b = 0; b < r; ++b) {
        M(a, b) = (a == b ? 1.0 : 0.0) - P(keep[a], keep[b]);
      }
    }
    Eigen::PartialPivLU<Matrix> lu(M);
    if (!(smallest_pivot(lu, nullptr) > kPivotFloor)) {
      throw Error(ErrorKind::not_irreducible,
                  "first-passage system for target " + std::to_string(j) +
                      " is singular; the chain is reducible");
    }
    const Vector t = lu.solve(Vector::Ones(r));
    for (Index a = 0; a < r; ++a) T(keep[a], j) = t(a);
  }
  return T;
}

double kirkland_lower_bound(const Vector& pi) {
  validate_distribution(pi);
  std::vector<double> sorted(pi.data(), pi.data() + pi.size());
  std::sort(sorted.begin(), sorted.end());
  double bound = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    bound += static_cast<double>(j) * sorted[j];
  }
  return bound;
}

double StructureMetrics::max() const noexcept {
  return std::max({stochasticity, stationarity, reversibility});
}

StructureMetrics check_structure(const Matrix& X, const Vector& pi) {
  const Index n = X.rows();
  if (X.cols() != n || pi.size() != n) {
    throw Error(ErrorKind::invalid_argument, "check_structure: dimension mismatch");
  }
  StructureMetrics m;
  m.stochasticity = (X.rowwise().sum() - Vector::Ones(n)).cwiseAbs().maxCoeff();
  m.stationarity = (pi.transpose() * X - pi.transpose()).cwiseAbs().maxCoeff();
  const Matrix balance = pi.asDiagonal() * X - X.transpose() * pi.asDiagonal();
  m.reversibility = balance.cwiseAbs().rowwise().sum().maxCoeff();
  return m;
}

double symmetrized_objective(const Matrix& X, const ReversibleChain& chain) {
  const Index n = chain.size();
  const Vector& ph = chain.pi_hat();
  const Matrix W = Matrix::Identity(n, n) -
                   ph.asDiagonal() * X * ph.cwiseInverse().asDiagonal() +
                   ph * ph.transpose();
  Eigen::PartialPivLU<Matrix> lu(W);
  if (!(smallest_pivot(lu, nullptr) > kPivotFloor)) {
    throw Error(ErrorKind::singular, "symmetrized objective: singular shift");
  }
  return lu.inverse().trace() + 0.5 * (X - chain.P()).squaredNorm();
}

}  // namespace kemeny
