#include "kemeny/error.hpp"
#include "kemeny/euclidean.hpp"
#include "kemeny/feasibility.hpp"
#include "kemeny/kemeny.hpp"
#include "kemeny/manifold.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

using namespace kemeny;
using namespace kemeny::manifold;
namespace oracle = kemeny::oracle;
using oracle::Rng;

namespace {

ManifoldSpec random_spec(Index n, Rng& rng, bool subset = false) {
  ReversibleChain c = oracle::random_walk_chain(n, 0.4, rng);
  Pattern S = subset ? oracle::random_connected_pattern(n, 0.3, rng) : c.pattern();
  return ManifoldSpec(std::move(c), std::move(S));
}

Matrix random_symmetric(Index n, Rng& rng) {
  const Matrix R = oracle::random_matrix(n, rng);
  return R + R.transpose();
}

}  // namespace

TEST(Manifold, SpecFixedPartAndBeta) {
  Rng rng(1);
  const ManifoldSpec s = random_spec(8, rng, true);
  EXPECT_LE((s.fixed() - s.fixed().transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GE(s.beta().minCoeff(), 0.0);
  EXPECT_GT((s.pi_hat() - s.beta()).minCoeff(), 0.0);
  const ReversibleChain path = ReversibleChain::from_transition(oracle::path_walk(4));
  EXPECT_THROW(ManifoldSpec(path, Pattern(4)), Error);
}

TEST(Manifold, FValueExamples) {
  Rng rng(2);
  const ManifoldSpec s = random_spec(7, rng);
  const Matrix X = s.symmetrize(s.chain().P());
  EXPECT_NEAR(f_value(X, s), kemeny_trace(s.chain().P()) + 1.0, 1e-10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix Y = random_point(s, seed);
    EXPECT_NEAR(f_value(Y, s), symmetrized_objective(s.desymmetrize(Y), s.chain()), 1e-10);
  }
  Matrix half = Matrix::Constant(2, 2, 0.5);
  const ManifoldSpec two(ReversibleChain(half, Vector::Constant(2, 0.5)), Pattern::full(2));
  EXPECT_NEAR(f_value(half, two), 2.0, 1e-14);
}

TEST(Manifold, EuclideanGradient) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const ManifoldSpec s = random_spec(3 + t % 6, rng, t % 2 == 1);
    const Matrix X = random_point(s, 100 + t);
    const Matrix G = euclidean_grad(X, s);
    for (int k = 0; k < 10; ++k) {
      // f is defined on symmetric matrices, so directions are symmetric.
      const Matrix V = random_symmetric(s.size(), rng);
      const double fd = oracle::directional_difference(
          [&](const Matrix& Y) { return f_value(Y, s); }, X, V, 1e-6);
      const double an = G.cwiseProduct(V).sum();
      EXPECT_LE(oracle::rel_err(fd, an, 1e-6), 1e-5);
    }
  }
  // Uniform pi with P the desymmetrized point: the gradient is ((I - X + J/n)^2)^{-1}.
  const Index n = 5;
  const ReversibleChain u = metropolis_hastings(Pattern::full(n), Vector::Constant(n, 1.0 / n));
  const ManifoldSpec su(u, Pattern::full(n));
  const Matrix X = su.symmetrize(u.P());
  const Matrix W = Matrix::Identity(n, n) - X + Matrix::Constant(n, n, 1.0 / n);
  const Matrix G = euclidean_grad(X, su);
  EXPECT_LE((G - (W * W).inverse()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((G - G.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Manifold, MetricExamples) {
  Rng rng(4);
  const ManifoldSpec s = random_spec(6, rng);
  const Matrix X = random_point(s, 1);
  const Matrix xi = random_tangent(X, s, 2), zeta = random_tangent(X, s, 3),
               eta = random_tangent(X, s, 4);
  EXPECT_GT(inner(X, xi, xi), 0.0);
  EXPECT_EQ(inner(X, Matrix::Zero(6, 6), Matrix::Zero(6, 6)), 0.0);
  const double a = 0.7, b = -1.3;
  EXPECT_NEAR(inner(X, a * xi + b * zeta, eta), a * inner(X, xi, eta) + b * inner(X, zeta, eta),
              1e-12 * (std::abs(inner(X, xi, eta)) + std::abs(inner(X, zeta, eta))));
  Matrix X2 = Matrix::Constant(2, 2, 0.5);
  Matrix e(2, 2);
  e << 1, -1, -1, 1;
  for (double c : {0.1, 1.0, 3.0}) EXPECT_NEAR(inner(X2, c * e, c * e), 8 * c * c, 1e-12);
}

TEST(Manifold, ProjectionProperties) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const ManifoldSpec s = random_spec(3 + t % 9, rng, t % 3 == 0);
    const Index n = s.size();
    const Matrix X = random_point(s, 500 + t);
    const Matrix Z = random_symmetric(n, rng);
    const Matrix P1 = project(X, Z, s);
    EXPECT_LE(tangent_residuals(P1, s).max(), 1e-12);
    EXPECT_LE((project(X, P1, s) - P1).cwiseAbs().maxCoeff(), 1e-12 * (1 + P1.cwiseAbs().maxCoeff()));
    // Normal vectors are annihilated.
    Vector alpha(n);
    for (Index i = 0; i < n; ++i) alpha(i) = std::normal_distribution<double>()(rng);
    const Matrix normal = (alpha * s.pi_hat().transpose() + s.pi_hat() * alpha.transpose())
                              .cwiseProduct(X.cwiseProduct(s.mask()));
    EXPECT_LE(project(X, normal, s).cwiseAbs().maxCoeff(), 1e-12 * (1 + normal.cwiseAbs().maxCoeff()));
    // The residual Z - Pi(Z) is metric-orthogonal to tangent vectors.
    const Matrix Zs = Z.cwiseProduct(s.mask());
    const Matrix xi = random_tangent(X, s, 900 + t);
    const double orth = inner(X, Zs - P1, xi);
    const double scale = std::sqrt(inner(X, Zs - P1, Zs - P1) * inner(X, xi, xi));
    EXPECT_LE(std::abs(orth), 1e-10 * scale);
  }
}

TEST(Manifold, RiemannianGradientIdentity) {
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const ManifoldSpec s = random_spec(3 + t % 6, rng, t % 2 == 0);
    const Matrix X = random_point(s, 40 + t);
    const Matrix g = riemannian_grad(X, s);
    EXPECT_LE(tangent_residuals(g, s).max(), 1e-12);
    for (int k = 0; k < 10; ++k) {
      const Matrix xi = random_tangent(X, s, 1000 * t + k);
      const double fd = oracle::directional_difference(
          [&](const Matrix& Y) { return f_value(Y, s); }, X, xi, 1e-6);
      EXPECT_LE(oracle::rel_err(fd, inner(X, g, xi), 1e-6), 1e-5);
    }
  }
}

TEST(Manifold, GradientVanishesAtConstrainedMinimizer) {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    const ReversibleChain c = oracle::random_walk_chain(7, 0.5, rng);
    const Pattern S = t % 2 == 0 ? c.pattern() : Pattern::full(7);
    const ManifoldSpec s(c, S);
    const ipm::IpmResult r = ipm::solve_constrained(c, S);
    const Matrix X = restore(s.symmetrize(r.X), s);
    const Matrix g = riemannian_grad(X, s);
    // The metric weights by 1/X, so bound-active entries (X ~ mu) also give
    // a vanishing contribution.
    EXPECT_LE(std::sqrt(inner(X, g, g)), 1e-4);
  }
}

TEST(Sinkhorn, Examples) {
  Rng rng(8);
  const ManifoldSpec s = random_spec(6, rng, true);
  const Matrix X = random_point(s, 3);
  const Matrix A = X.cwiseProduct(s.mask());
  const Vector d = sinkhorn_balance(A, s);
  EXPECT_LE((d - Vector::Ones(6)).lpNorm<Eigen::Infinity>(), 1e-12);

  Matrix one(1, 1);
  one << 1.0;
  const ManifoldSpec scalar(ReversibleChain(one, Vector::Ones(1)), Pattern(1));
  Matrix a(1, 1);
  a << 4.0;
  EXPECT_NEAR(sinkhorn_balance(a, scalar)(0), 0.5, 1e-15);

  for (int t = 0; t < 20; ++t) {
    const ManifoldSpec sp = random_spec(10, rng, t % 2 == 0);
    Matrix B = Matrix::Zero(10, 10);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (Index i = 0; i < 10; ++i)
      for (Index j = i; j < 10; ++j)
        if (sp.pattern().contains(i, j)) B(i, j) = B(j, i) = u(rng);
    const Vector e = sinkhorn_balance(B, sp);
    EXPECT_GT(e.minCoeff(), 0.0);
    const Vector res = e.asDiagonal() * B * e.asDiagonal() * sp.pi_hat() - (sp.pi_hat() - sp.beta());
    EXPECT_LE(res.lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Retraction, Branches) {
  Rng rng(9);
  const ManifoldSpec s = random_spec(8, rng, true);
  const Matrix X = random_point(s, 11);
  EXPECT_EQ(retract(X, Matrix::Zero(8, 8), s), X);
  const Matrix xi = random_tangent(X, s, 12);
  const double margin = positivity_margin(X, xi, s);
  ASSERT_TRUE(std::isfinite(margin));
  const Matrix small = retract(X, 0.5 * margin * xi, s);
  EXPECT_LE((small - (X + 0.5 * margin * xi)).cwiseAbs().maxCoeff(), 1e-16);

  const Matrix big = retract(X, 3.0 * margin * xi, s);
  const PointResiduals r = point_residuals(big, s);
  EXPECT_LE(r.max(), 1e-10);
  EXPECT_GT(r.min_on_pattern, 0.0);
  EXPECT_LE(check_structure(s.desymmetrize(big), s.pi()).max(), 1e-10);
}

TEST(Manifold, RandomPointsBatch) {
  Rng rng(10);
  const ManifoldSpec s = random_spec(10, rng, true);
  EXPECT_EQ(random_point(s, 5), random_point(s, 5));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix X = random_point(s, seed);
    const PointResiduals r = point_residuals(X, s);
    EXPECT_LE(r.max(), 1e-12);
    EXPECT_GT(r.min_on_pattern, 0.0);
    const Matrix P = s.desymmetrize(X);
    EXPECT_LE(check_structure(P, s.pi()).max(), 1e-12);
    for (Index i = 0; i < 10; ++i)
      for (Index j = 0; j < 10; ++j)
        if (!s.pattern().contains(i, j)) EXPECT_NEAR(P(i, j), s.chain().P()(i, j), 1e-15);
  }
}

TEST(Manifold, DescentAlongNegativeGradient) {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const ManifoldSpec s = random_spec(6, rng, t % 2 == 0);
    const Matrix X = random_point(s, 70 + t);
    const Matrix g = riemannian_grad(X, s);
    if (std::sqrt(inner(X, g, g)) <= 1e-8) continue;
    const double t0 = std::min(1e-3, 0.5 * positivity_margin(X, -g, s));
    EXPECT_LT(f_value(retract(X, -t0 * g, s), s), f_value(X, s));
  }
}

TEST(Manifold, ProjectionSolvesOnManyPoints) {
  Rng rng(13);
  const ManifoldSpec s = random_spec(9, rng, true);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Matrix X = random_point(s, seed);
    EXPECT_NO_THROW(project(X, oracle::random_matrix(9, rng), s));
  }
}
