#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/types.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace kemeny::oracle {

using Rng = std::mt19937_64;

/// Random connected symmetric pattern: a random spanning tree plus each
/// remaining pair with probability `density`.
Pattern random_connected_pattern(Index n, double density, Rng& rng);

/// Weighted random walk on a random connected graph, optionally with loops.
/// Every reversible chain arises this way, so this is an independent source
/// of test chains (no balancing involved): P = D^{-1} W, pi = W1 / 1^T W 1.
ReversibleChain random_walk_chain(Index n, double density, Rng& rng,
                                  bool loops = true);

/// Random positive vector with unit sum.
Vector random_distribution(Index n, Rng& rng);

/// Random vector with h^T 1 = 1 (entries may be negative).
Vector random_normalized(Index n, Rng& rng);

Matrix random_matrix(Index n, Rng& rng);

/// K for the 2-state chain [[1-a, a], [b, 1-b]].
inline double two_state_kemeny(double a, double b) { return 1.0 / (a + b); }

/// K for the random walk on the complete graph K_n.
inline double complete_graph_kemeny(Index n) {
  const double m = static_cast<double>(n);
  return (m - 1.0) * (m - 1.0) / m;
}

/// Complete-graph walk (J - I) / (n - 1).
Matrix complete_graph_walk(Index n);

/// Random walk on the path 1 - 2 - ... - n.
Matrix path_walk(Index n);

/// Central finite difference of a scalar function along a direction.
double directional_difference(const std::function<double(const Matrix&)>& f,
                              const Matrix& x, const Matrix& v, double step);

/// Symmetric relative error |a - b| / max(|a|, |b|, floor).
double rel_err(double a, double b, double floor = 1e-8);

/// Every (K, bound) pair observed during a run, for the global bound check.
struct BoundRecord {
  double kemeny;
  double bound;
  const char* source;
};

void record_bound(double kemeny, double bound, const char* source);
const std::vector<BoundRecord>& bound_records();


/// Weighted graph on a random connected pattern, no self-loops, weights
/// exp(-4u) with u uniform: skewed enough that deleting single edges can
/// lower K for the random walk.
Matrix skewed_graph(Index n, double density, std::uint64_t seed);

/// P = D^{-1} A.
Matrix walk_matrix(const Matrix& A);

struct DeletionOracle {
  std::vector<std::pair<IndexPair, double>> lowering;  ///< pairs whose deletion lowers K
  double best = 0.0;  ///< min K over all connected single deletions
  double base = 0.0;  ///< K of the walk on A
};

/// Exhaustive single-edge deletion on the random walk of A (deletion keeps
/// the graph connected).
DeletionOracle single_deletions(const Matrix& A);

}  // namespace kemeny::oracle
