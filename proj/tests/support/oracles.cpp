#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace kemeny::oracle {

Pattern random_connected_pattern(Index n, double density, Rng& rng) {
  Pattern p(n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (Index k = 1; k < n; ++k) {
    std::uniform_int_distribution<Index> pick(0, k - 1);
    p.insert(order[static_cast<std::size_t>(k)],
             order[static_cast<std::size_t>(pick(rng))]);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (u(rng) < density) p.insert(i, j);
    }
  }
  return p;
}

ReversibleChain random_walk_chain(Index n, double density, Rng& rng, bool loops) {
  const Pattern p = random_connected_pattern(n, density, rng);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  Matrix W = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (loops) W(i, i) = w(rng);
    for (Index j = i + 1; j < n; ++j) {
      if (p.contains(i, j)) W(i, j) = W(j, i) = w(rng);
    }
  }
  if (n == 1) W(0, 0) = 1.0;
  const Vector d = W.rowwise().sum();
  Matrix P = d.cwiseInverse().asDiagonal() * W;
  Vector pi = d / d.sum();
  return ReversibleChain(std::move(P), std::move(pi), p);
}

Vector random_distribution(Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v / v.sum();
}

Vector random_normalized(Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  v(n - 1) = 1.0 - (v.sum() - v(n - 1));
  return v;
}

Matrix random_matrix(Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = g(rng);
  }
  return m;
}

Matrix complete_graph_walk(Index n) {
  return (Matrix::Ones(n, n) - Matrix::Identity(n, n)) /
         static_cast<double>(n - 1);
}

Matrix path_walk(Index n) {
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) A(i, i + 1) = A(i + 1, i) = 1.0;
  const Vector d = A.rowwise().sum();
  return d.cwiseInverse().asDiagonal() * A;
}

double directional_difference(const std::function<double(const Matrix&)>& f,
                              const Matrix& x, const Matrix& v, double step) {
  return (f(x + step * v) - f(x - step * v)) / (2.0 * step);
}

double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

namespace {
std::mutex& records_mutex() {
  static std::mutex m;
  return m;
}
std::vector<BoundRecord>& records() {
  static std::vector<BoundRecord> r;
  return r;
}
}  // namespace

void record_bound(double kemeny, double bound, const char* source) {
  std::lock_guard<std::mutex> lock(records_mutex());
  records().push_back({kemeny, bound, source});
}

const std::vector<BoundRecord>& bound_records() { return records(); }

Matrix skewed_graph(Index n, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Pattern p = random_connected_pattern(n, density, rng);
  Matrix A = Matrix::Zero(n, n);
  for (const auto& [i, j] : p.off_diagonal_pairs()) A(i, j) = A(j, i) = std::exp(-4.0 * u(rng));
  return A;
}

Matrix walk_matrix(const Matrix& A) {
  const Vector d = A.rowwise().sum();
  return d.cwiseInverse().asDiagonal() * A;
}

namespace {

// Spectral K of the walk on a connected graph: eigenvalues of the symmetric
// D^{-1/2} A D^{-1/2}.
double walk_kemeny(const Matrix& A) {
  const Vector s = A.rowwise().sum().cwiseSqrt().cwiseInverse();
  const Matrix M = s.asDiagonal() * A * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();  // ascending; the last is 1
  double k = 0.0;
  for (Index i = 0; i + 1 < ev.size(); ++i) k += 1.0 / (1.0 - ev(i));
  return k;
}

bool connected(const Matrix& A) {
  const Index n = A.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{0};
  seen[0] = true;
  Index count = 1;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      if (A(i, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace

DeletionOracle single_deletions(const Matrix& A) {
  DeletionOracle out;
  out.base = walk_kemeny(A);
  out.best = out.base;
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = i + 1; j < A.cols(); ++j) {
      if (!(A(i, j) > 0.0)) continue;
      Matrix B = A;
      B(i, j) = B(j, i) = 0.0;
      if (!connected(B)) continue;
      const double k = walk_kemeny(B);
      out.best = std::min(out.best, k);
      if (k < out.base) out.lowering.push_back({{i, j}, k});
    }
  }
  return out;
}

}  // namespace kemeny::oracle
