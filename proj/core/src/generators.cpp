#include "kemeny/generators.hpp"

#include "kemeny/error.hpp"
#include "kemeny/feasibility.hpp"
#include "kemeny/kemeny.hpp"
#include "kemeny/manifold.hpp"

#include <random>

namespace kemeny {

namespace {

using Rng = std::mt19937_64;

constexpr int kAttempts = 100;

Vector random_pi(Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector pi(n);
  for (Index i = 0; i < n; ++i) pi(i) = 0.05 + u(rng);
  return pi / pi.sum();
}

Pattern bernoulli_pattern(Index n, double density, Rng& rng) {
  std::bernoulli_distribution keep(density);
  Pattern S(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (keep(rng)) S.insert(i, j);
    }
  }
  return S;
}

[[noreturn]] void disconnected(double density) {
  throw Error(ErrorKind::infeasible,
              "density " + std::to_string(density) + " gave a disconnected pattern in " +
                  std::to_string(kAttempts) + " attempts");
}

Pattern connected_pattern(Index n, double density, Rng& rng) {
  for (int k = 0; k < kAttempts; ++k) {
    Pattern S = bernoulli_pattern(n, density, rng);
    if (check_irreducible(S)) return S;
  }
  disconnected(density);
}

// Random point of the reversible set around `base` with free pattern S.
Matrix random_on(const ReversibleChain& base, const Pattern& S, Rng& rng) {
  const manifold::ManifoldSpec spec(base, S);
  return spec.desymmetrize(manifold::random_point(spec, rng()));
}

GeneratedChain random_reversible(Index n, double density, Rng& rng) {
  const Vector pi = random_pi(n, rng);
  Pattern S = connected_pattern(n, density, rng);
  const ReversibleChain mh = metropolis_hastings(S, pi);
  Matrix P = random_on(mh, S, rng);
  return {ReversibleChain(std::move(P), pi, S), S};
}

GeneratedChain random_pattern_subset(Index n, double density, Rng& rng) {
  const Vector pi = random_pi(n, rng);
  for (int k = 0; k < kAttempts; ++k) {
    Pattern S = bernoulli_pattern(n, density, rng);
    const Pattern T0 = bernoulli_pattern(n, density, rng);
    Pattern T(n);
    for (const auto& [i, j] : T0.off_diagonal_pairs()) {
      if (!S.contains(i, j)) T.insert(i, j);
    }
    const Pattern both = pattern_union(S, T);
    if (!check_irreducible(both)) continue;
    const Matrix R = random_on(metropolis_hastings(Pattern::full(n), pi), Pattern::full(n), rng);
    Matrix Q = Matrix::Zero(n, n);
    for (const auto& [i, j] : both.off_diagonal_pairs()) {
      Q(i, j) = R(i, j);
      Q(j, i) = R(j, i);
    }
    Q.diagonal() = Vector::Ones(n) - Q.rowwise().sum();
    const ReversibleChain base(Q, pi, both);
    Matrix P = random_on(base, S, rng);
    return {ReversibleChain(std::move(P), pi, both), S};
  }
  disconnected(density);
}

GeneratedChain nearly_reducible(Index n, double density, double coupling, Rng& rng) {
  if (n < 4) throw Error(ErrorKind::invalid_argument, "nearly-reducible needs n >= 4");
  if (!(coupling > 0.0 && coupling < 0.5)) {
    throw Error(ErrorKind::invalid_argument, "coupling must lie in (0, 0.5)");
  }
  const Index m = n / 2;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix Q = Matrix::Zero(n, n);
  auto block = [&](Index off, Index size) {
    const Pattern B = connected_pattern(size, density, rng);
    for (Index i = 0; i < size; ++i) {
      for (Index j = 0; j < size; ++j) {
        if (B.contains(i, j)) Q(off + i, off + j) = u(rng);
      }
      const double s = Q.block(off + i, off, 1, size).sum();
      Q.block(off + i, off, 1, size) *= (1.0 - coupling) / s;
    }
  };
  block(0, m);
  block(m, n - m);
  // Off-block mass `coupling` per row, spread over the other block.
  for (Index i = 0; i < n; ++i) {
    const bool first = i < m;
    const Index off = first ? m : 0;
    const Index size = first ? n - m : m;
    Vector w(size);
    for (Index k = 0; k < size; ++k) w(k) = u(rng);
    w *= coupling / w.sum();
    for (Index k = 0; k < size; ++k) Q(i, off + k) = w(k);
  }
  const Vector pi = stationary_distribution(Q);
  Matrix P = metropolis_adjust(Q, pi);
  ReversibleChain chain(std::move(P), pi);
  Pattern S = chain.pattern();
  return {std::move(chain), std::move(S)};
}

}  // namespace

ChainKind parse_chain_kind(const std::string& name) {
  if (name == "random-reversible") return ChainKind::random_reversible;
  if (name == "nearly-reducible") return ChainKind::nearly_reducible;
  if (name == "random-pattern-subset") return ChainKind::random_pattern_subset;
  throw Error(ErrorKind::invalid_argument, "unknown chain kind '" + name + "'");
}

const char* to_string(ChainKind kind) noexcept {
  switch (kind) {
    case ChainKind::random_reversible: return "random-reversible";
    case ChainKind::nearly_reducible: return "nearly-reducible";
    case ChainKind::random_pattern_subset: return "random-pattern-subset";
  }
  return "?";
}

GeneratedChain generate_test_chain(ChainKind kind, Index n, std::uint64_t seed,
                                   const GeneratorOptions& opts) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "n must be at least 2");
  if (!(opts.density > 0.0 && opts.density <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "density must lie in (0, 1]");
  }
  Rng rng(seed);
  switch (kind) {
    case ChainKind::random_reversible: return random_reversible(n, opts.density, rng);
    case ChainKind::random_pattern_subset: return random_pattern_subset(n, opts.density, rng);
    case ChainKind::nearly_reducible:
      return nearly_reducible(n, opts.density, opts.coupling, rng);
  }
  throw Error(ErrorKind::invalid_argument, "unknown chain kind");
}

}  // namespace kemeny
