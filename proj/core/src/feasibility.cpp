#include "kemeny/feasibility.hpp"

#include "kemeny/error.hpp"
#include "kemeny/kemeny.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kemeny {

namespace {

void require_size(const ReversibleChain& chain, const Pattern& S) {
  if (S.size() != chain.size()) {
    throw Error(ErrorKind::invalid_argument, "pattern and chain sizes differ");
  }
}

// Uniform proposal on the adjacency of a pattern (self-pairs included).
Matrix uniform_proposal(const Pattern& pattern) {
  Matrix A = pattern.mask();
  const Vector degree = A.rowwise().sum();
  return degree.cwiseInverse().asDiagonal() * A;
}

void complete_diagonal(Matrix& X) {
  for (Index i = 0; i < X.rows(); ++i) {
    double off = 0.0;
    for (Index j = 0; j < X.cols(); ++j) {
      if (j != i) off += X(i, j);
    }
    X(i, i) = 1.0 - off;
  }
}

constexpr double kDegenerate = 1e-14;

}  // namespace

Matrix metropolis_adjust(const Matrix& Q, const Vector& pi) {
  const Index n = Q.rows();
  if (Q.cols() != n || pi.size() != n) {
    throw Error(ErrorKind::invalid_argument, "metropolis_adjust: dimension mismatch");
  }
  Matrix X = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || Q(i, j) == 0.0) continue;
      if (Q(j, i) == 0.0) {
        throw Error(ErrorKind::invalid_argument,
                    "proposal pattern is not symmetric at (" +
                        std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      // Q_ij min{1, pi_j Q_ji / (pi_i Q_ij)} written without the ratio.
      X(i, j) = std::min(Q(i, j), pi(j) * Q(j, i) / pi(i));
    }
  }
  complete_diagonal(X);
  return X;
}

ReversibleChain metropolis_hastings(const Pattern& pattern, const Vector& pi) {
  validate_distribution(pi);
  if (pattern.size() != pi.size()) {
    throw Error(ErrorKind::invalid_argument, "pattern and pi sizes differ");
  }
  if (!check_irreducible(pattern)) {
    throw Error(ErrorKind::not_irreducible,
                "Metropolis-Hastings needs an irreducible pattern");
  }
  return ReversibleChain(metropolis_adjust(uniform_proposal(pattern), pi), pi,
                         pattern);
}

Matrix fixed_entries(const ReversibleChain& chain, const Pattern& S) {
  require_size(chain, S);
  const Index n = chain.size();
  Matrix P0 = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (!S.contains(i, j)) P0(i, j) = chain.P()(i, j);
    }
  }
  return P0;
}

double completion_delta_max(const ReversibleChain& chain, const Pattern& S) {
  return 1.0 - fixed_entries(chain, S).rowwise().sum().maxCoeff();
}

Matrix feasible_completion(const ReversibleChain& chain, const Pattern& S,
                           std::optional<double> delta) {
  require_size(chain, S);
  const double delta_max = completion_delta_max(chain, S);
  if (delta_max <= kDegenerate) {
    throw Error(ErrorKind::infeasible,
                "degenerate feasible set: ||P^0 1||_inf = 1, so the only "
                "feasible matrix is P itself and there is nothing to optimize");
  }
  const double d = delta.value_or(0.5 * delta_max);
  if (d < 0.0 || d > delta_max) {
    std::ostringstream os;
    os << "completion weight " << d << " outside [0, " << delta_max << "]";
    throw Error(ErrorKind::bound_violation, os.str());
  }
  const Index n = chain.size();
  const Matrix mh = metropolis_adjust(uniform_proposal(S), chain.pi());
  Matrix X = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      X(i, j) = S.contains(i, j) ? d * mh(i, j) : chain.P()(i, j);
    }
  }
  complete_diagonal(X);
  return X;
}

std::pair<double, double> theta_range(const ReversibleChain& chain) {
  double upper = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < chain.size(); ++i) {
    const double pii = chain.P()(i, i);
    if (pii < 1.0) upper = std::min(upper, pii / (1.0 - pii));
  }
  return {-1.0, upper};
}

Matrix theta_perturbation(const ReversibleChain& chain, double theta) {
  const auto [lo, hi] = theta_range(chain);
  if (theta < lo || theta > hi) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the admissible interval [" << lo
       << ", " << hi << "]";
    throw Error(ErrorKind::bound_violation, os.str());
  }
  const Index n = chain.size();
  Matrix X = chain.P() + theta * (chain.P() - Matrix::Identity(n, n));
  // Rounding at the binding end of the interval.
  for (Index i = 0; i < n; ++i) {
    if (X(i, i) < 0.0 && X(i, i) > -1e-15) X(i, i) = 0.0;
  }
  return X;
}

Matrix interior_start(const ReversibleChain& chain, const Pattern& S) {
  require_size(chain, S);
  const Index n = chain.size();
  const Matrix& P = chain.P();
  bool interior = true;
  for (Index i = 0; i < n && interior; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (S.contains(i, j) && !(P(i, j) > 0.0)) {
        interior = false;
        break;
      }
    }
  }
  if (interior) return P;

  const Matrix step = feasible_completion(chain, S) - P;
  Matrix best;
  double best_f = std::numeric_limits<double>::infinity();
  double tau = 1.0;
  for (int k = 0; k <= 12; ++k, tau *= 0.5) {
    Matrix X = P + tau * step;
    // Row sums are exact up to rounding; restore them on the diagonal so the
    // start sits on the feasible set to machine precision.
    for (Index i = 0; i < n; ++i) X(i, i) += 1.0 - X.row(i).sum();
    const double f = symmetrized_objective(X, chain);
    if (f < best_f) {
      best_f = f;
      best = std::move(X);
    }
  }
  return best;
}

}  // namespace kemeny
