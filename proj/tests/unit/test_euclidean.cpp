#include "kemeny/error.hpp"
#include "kemeny/euclidean.hpp"
#include "kemeny/feasibility.hpp"
#include "kemeny/kemeny.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

using namespace kemeny;
using namespace kemeny::ipm;
namespace oracle = kemeny::oracle;
using oracle::Rng;

namespace {

Vector vec(const Matrix& M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

// Random perturbation inside the feasible set, in coordinates.
CoordinateVariable random_feasible_delta(const ReversibleChain& c, const Pattern& S,
                                         Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 0.8);
  const double dmax = completion_delta_max(c, S);
  const Matrix X = feasible_completion(c, S, u(rng) * dmax);
  CoordinateVariable d = CoordinateVariable::gather(S, X - c.P());
  return d;
}

// Independent dense evaluation of g on a full n x n Delta.
double dense_g(const ReversibleChain& c, const Matrix& Delta) {
  const Index n = c.size();
  const Vector& ph = c.pi_hat();
  const Matrix H = Matrix::Identity(n, n) -
                   ph.asDiagonal() * (c.P() + Delta) * ph.cwiseInverse().asDiagonal() +
                   ph * ph.transpose();
  return H.fullPivLu().inverse().trace() + 0.5 * Delta.squaredNorm();
}

}  // namespace

TEST(Commutation, Examples) {
  EXPECT_EQ(build_commutation(1), std::vector<Index>{0});
  Matrix M(2, 2);
  M << 1, 2, 3, 4;
  const SparseMatrix T = commutation_matrix(2);
  const Vector v = vec(M);
  Vector expected(4);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(Vector(T * v), expected);
  Rng rng(1);
  for (Index n = 1; n < 7; ++n) {
    const SparseMatrix Tn = commutation_matrix(n);
    const Matrix R = oracle::random_matrix(n, rng);
    EXPECT_EQ(Vector(Tn * vec(R)), vec(R.transpose()));
    EXPECT_EQ(Matrix(Tn * Tn), Matrix::Identity(n * n, n * n));
  }
}

TEST(Constraints, Examples) {
  Rng rng(4);
  const ReversibleChain uni = metropolis_hastings(Pattern::full(4), Vector::Constant(4, 0.25));
  const VectorizedProblem p = build_constraints(uni, Pattern::full(4));
  EXPECT_EQ(p.m(), 16);
  EXPECT_EQ(Vector(p.A * Vector::Zero(16)).norm(), 0.0);
  Matrix D = Matrix::Zero(4, 4);
  D(0, 1) = D(1, 0) = 0.1;
  D(2, 3) = D(3, 2) = -0.05;
  D(0, 3) = D(3, 0) = 0.02;
  for (Index i = 0; i < 4; ++i) D(i, i) = -(D.row(i).sum() - D(i, i));
  EXPECT_LE(Vector(p.A * p.layout.gather(D)).lpNorm<Eigen::Infinity>(), 1e-16);

  const ReversibleChain c = oracle::random_walk_chain(4, 1.0, rng);
  const VectorizedProblem q = build_constraints(c, Pattern::full(4));
  Matrix E = Matrix::Zero(4, 4);
  E(0, 1) = 1.0;
  E(0, 0) = -1.0;
  const Vector Ae = q.A * q.layout.gather(E);
  EXPECT_LE(Ae.head(4).lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_GT(Ae.lpNorm<Eigen::Infinity>(), 0.0);

  // Selection acts as the restriction vec -> stored coordinates.
  const Matrix R = oracle::random_matrix(4, rng);
  Pattern S = Pattern::full(4);
  S.erase(0, 2);
  const VectorizedProblem r = build_constraints(c, S);
  EXPECT_EQ(Vector(r.selection * vec(R)), r.layout.gather(R));
  EXPECT_EQ(r.lower, -r.layout.gather(c.P()));
}

TEST(Constraints, NullspaceIsExactBasis) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Index n = 3 + t % 8;
    const ReversibleChain c = oracle::random_walk_chain(n, 0.5, rng);
    const Pattern S = oracle::random_connected_pattern(n, 0.4, rng);
    const VectorizedProblem p = build_constraints(c, S);
    const Matrix AN = Matrix(p.A * p.nullspace);
    EXPECT_LE(AN.cwiseAbs().maxCoeff(), 1e-15);
    const Matrix Nd(p.nullspace);
    EXPECT_EQ(Nd.fullPivLu().rank(), static_cast<Index>(S.off_diagonal_count()));
    // dim ker A = number of off-diagonal pairs.
    const Matrix Ad(p.A);
    EXPECT_EQ(p.m() - Ad.fullPivLu().rank(), static_cast<Index>(S.off_diagonal_count()));
  }
  EXPECT_THROW(build_constraints(oracle::random_walk_chain(3, 1.0, rng), Pattern(4)), Error);
}

TEST(Objective, AtZeroIsKemenyPlusOne) {
  Rng rng(2);
  const ReversibleChain c = oracle::random_walk_chain(7, 0.5, rng);
  const ObjectiveGradient og =
      objective_and_gradient(CoordinateVariable::zeros(c.pattern()), c);
  EXPECT_NEAR(og.value, kemeny_trace(c.P()) + 1.0, 1e-10);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  Rng rng(13);
  for (int t = 0; t < 25; ++t) {
    const Index n = 2 + t % 7;
    const ReversibleChain c = oracle::random_walk_chain(n, 0.6, rng);
    const CoordinateVariable d = random_feasible_delta(c, c.pattern(), rng);
    const ObjectiveGradient og = objective_and_gradient(d, c);
    const double gmax = og.gradient.lpNorm<Eigen::Infinity>();
    for (Index q = 0; q < d.size(); ++q) {
      CoordinateVariable a = d, b = d;
      a.values(q) += 1e-6;
      b.values(q) -= 1e-6;
      const double fd =
          (objective_and_gradient(a, c).value - objective_and_gradient(b, c).value) / 2e-6;
      EXPECT_LE(std::abs(fd - og.gradient(q)) / std::max(std::abs(og.gradient(q)), 1e-3 * gmax),
                1e-5);
    }
  }
}

TEST(Objective, UniformAndFullPatternForms) {
  Rng rng(17);
  const Index n = 6;
  const ReversibleChain uni = metropolis_hastings(
      oracle::random_connected_pattern(n, 0.5, rng), Vector::Constant(n, 1.0 / n));
  const CoordinateVariable d = random_feasible_delta(uni, uni.pattern(), rng);
  const Matrix H = Matrix::Identity(n, n) - (uni.P() + d.to_matrix()) +
                   Matrix::Constant(n, n, 1.0 / n);
  const Matrix H2inv = (H * H).inverse();
  const Vector expected = d.gather(H2inv.transpose()) + d.values;
  EXPECT_LE((objective_and_gradient(d, uni).gradient - expected).lpNorm<Eigen::Infinity>(),
            1e-10 * expected.lpNorm<Eigen::Infinity>());

  // Full pattern: coordinate gradient = dense Pi o (H_s^{-2})^T + Delta reshaped.
  const ReversibleChain c = oracle::random_walk_chain(n, 1.0, rng);
  const Pattern full = Pattern::full(n);
  const CoordinateVariable e = random_feasible_delta(c, full, rng);
  const Vector& ph = c.pi_hat();
  const Matrix Hs = Matrix::Identity(n, n) -
                    ph.asDiagonal() * (c.P() + e.to_matrix()) * ph.cwiseInverse().asDiagonal() +
                    ph * ph.transpose();
  const Matrix Hs2 = (Hs * Hs).inverse();
  Matrix dense(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) dense(i, j) = ph(i) / ph(j) * Hs2(j, i) + e.to_matrix()(i, j);
  EXPECT_LE((objective_and_gradient(e, c).gradient - vec(dense)).lpNorm<Eigen::Infinity>(),
            1e-10 * dense.cwiseAbs().maxCoeff());
  EXPECT_NEAR(objective_and_gradient(e, c).value, dense_g(c, e.to_matrix()), 1e-10);
}

TEST(Hessian, FiniteDifferenceAndStructure) {
  Rng rng(23);
  for (int t = 0; t < 5; ++t) {
    const ReversibleChain c = oracle::random_walk_chain(5, 0.6, rng);
    const CoordinateVariable zero = CoordinateVariable::zeros(c.pattern());
    const Matrix H0 = hessian(zero, c);
    // Self-pair coordinates carry a positive trace contribution on top of the
    // identity; the trace part is positive semidefinite on feasible directions.
    for (Index q = 0; q < zero.size(); ++q) {
      if (zero.rows[q] == zero.cols[q]) EXPECT_GE(H0(q, q), 1.0);
    }
    const VectorizedProblem prob = build_constraints(c, c.pattern());
    const Matrix Nd(prob.nullspace);
    const Matrix reduced = Nd.transpose() * (H0 - Matrix::Identity(H0.rows(), H0.cols())) * Nd;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff());
    EXPECT_LE((H0 - H0.transpose()).cwiseAbs().maxCoeff(), 1e-12 * H0.cwiseAbs().maxCoeff());

    const CoordinateVariable d = random_feasible_delta(c, c.pattern(), rng);
    const Matrix H = hessian(d, c);
    const double hmax = H.cwiseAbs().maxCoeff();
    for (Index q = 0; q < d.size(); ++q) {
      CoordinateVariable a = d, b = d;
      a.values(q) += 1e-5;
      b.values(q) -= 1e-5;
      const Vector col =
          (objective_and_gradient(a, c).gradient - objective_and_gradient(b, c).gradient) / 2e-5;
      for (Index p = 0; p < d.size(); ++p) {
        EXPECT_LE(std::abs(col(p) - H(p, q)) / std::max(std::abs(H(p, q)), 1e-3 * hmax), 1e-4);
      }
    }
  }
  Rng r2(1);
  const ReversibleChain c = oracle::random_walk_chain(5, 1.0, r2);
  try {
    hessian(CoordinateVariable::zeros(Pattern::full(5)), c, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource_limit);
  }
}

TEST(Nnls, SmallProblems) {
  Matrix C(3, 2);
  C << 1, 0, 0, 1, 1, 1;
  Vector d(3);
  d << 1, -1, 0;
  const Vector x = nnls(C, d);
  EXPECT_GE(x.minCoeff(), 0.0);
  EXPECT_NEAR(x(0), 0.5, 1e-12);
  EXPECT_NEAR(x(1), 0.0, 1e-12);
}

TEST(SolveConstrained, RandomReversibleSamePattern) {
  Rng rng(31);
  const ReversibleChain c = oracle::random_walk_chain(10, 0.3, rng);
  const VectorizedProblem prob = build_constraints(c, c.pattern());
  IpmOptions opts;
  double worst_eq = 0.0, worst_slack = 1.0;
  opts.observer = [&](const Vector& delta) {
    worst_eq = std::max(worst_eq, Vector(prob.A * delta).lpNorm<Eigen::Infinity>());
    worst_slack = std::min(worst_slack, (delta - prob.lower).minCoeff());
  };
  const IpmResult r = solve_constrained(c, c.pattern(), opts);
  EXPECT_EQ(r.report.exit, ExitReason::converged);
  EXPECT_LE(r.report.kemeny_after, r.report.kemeny_before);
  EXPECT_LE(check_structure(r.X, c.pi()).max(), 1e-6);
  EXPECT_LE(r.kkt_residual, opts.inner_tol);
  EXPECT_LE(worst_eq, 1e-12);
  EXPECT_GT(worst_slack, 0.0);
  for (std::size_t s = 1; s < r.stage_objectives.size(); ++s) {
    EXPECT_LE(r.stage_objectives[s], r.stage_objectives[s - 1] + 1e-10);
  }
  EXPECT_NEAR(r.stage_objectives.back(), symmetrized_objective(r.X, c), 1e-9);
}

TEST(SolveConstrained, AlreadyOptimal) {
  const Index n = 6;
  const ReversibleChain c = ReversibleChain::from_transition(oracle::complete_graph_walk(n));
  const IpmResult r = solve_constrained(c, Pattern::full(n));
  EXPECT_LE(r.outer_iterations, 2);
  EXPECT_LE((r.X - c.P()).norm(), 1e-8);
  EXPECT_EQ(r.report.exit, ExitReason::converged);

  // Same answer without the shortcut, through the barrier path.
  IpmOptions opts;
  opts.kkt_precheck = false;
  const IpmResult b = solve_constrained(c, Pattern::full(n), opts);
  EXPECT_LE((b.X - c.P()).norm(), 1e-6);
}

TEST(SolveConstrained, SecantMode) {
  Rng rng(41);
  const ReversibleChain c = oracle::random_walk_chain(8, 0.4, rng);
  IpmOptions opts;
  opts.hessian_mode = HessianMode::secant;
  const IpmResult r = solve_constrained(c, c.pattern(), opts);
  EXPECT_TRUE(r.used_secant);
  const IpmResult e = solve_constrained(c, c.pattern());
  EXPECT_LE(r.report.kemeny_after, r.report.kemeny_before);
  EXPECT_LE(check_structure(r.X, c.pi()).max(), 1e-6);
  EXPECT_NEAR(symmetrized_objective(r.X, c), symmetrized_objective(e.X, c),
              1e-6 * symmetrized_objective(e.X, c));
}

TEST(SolveConstrained, DegenerateFeasibleSet) {
  const ReversibleChain c = ReversibleChain::from_transition(oracle::path_walk(5));
  try {
    solve_constrained(c, Pattern(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(SolveConstrained, SubsetPatternKeepsFixedEntries) {
  Rng rng(43);
  const ReversibleChain c = oracle::random_walk_chain(9, 0.6, rng);
  const Pattern S = oracle::random_connected_pattern(9, 0.2, rng);
  const IpmResult r = solve_constrained(c, S);
  EXPECT_LE(r.report.kemeny_after, r.report.kemeny_before);
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j)
      if (!S.contains(i, j)) EXPECT_EQ(r.X(i, j), c.P()(i, j));
  EXPECT_LE(check_structure(r.X, c.pi()).max(), 1e-6);
}
