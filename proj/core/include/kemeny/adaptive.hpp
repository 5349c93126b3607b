#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/manifold.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/report.hpp"
#include "kemeny/riemannian.hpp"
#include "kemeny/types.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace kemeny::adaptive {

struct AdaptiveSchedule {
  double initial_tol = 1e-3;
  double shrink = 1e-3;
  double final_tol = 1e-12;
  /// Off-diagonal entries of X at or below this are removed from the pattern.
  double threshold = std::numeric_limits<double>::epsilon();

  void validate() const;
  /// Inner tolerances, initial_tol down to final_tol inclusive.
  std::vector<double> tolerances() const;
};

enum class InnerSolver { riem_cg, riem_bb };

struct AdaptiveOptions {
  AdaptiveSchedule schedule;
  InnerSolver inner = InnerSolver::riem_cg;
  /// Inner solver settings; tol is replaced by the schedule each round.
  riemannian::SolverOptions solver;
  /// Receives one message per refused prune.
  std::function<void(const std::string&)> warn;
};

struct Round {
  double tol = 0.0;
  double f = 0.0;  ///< at the end of the inner solve, before pruning
  Index iterations = 0;
  ExitReason exit = ExitReason::converged;
  std::vector<IndexPair> pruned;
  /// Below the threshold but kept because removal disconnects the chain.
  std::vector<IndexPair> kept;
  std::size_t free_pairs = 0;  ///< off-diagonal pairs of S after pruning
};

struct AdaptiveResult {
  Matrix X;  ///< symmetrized final point
  Matrix P;  ///< D_pihat^{-1} X D_pihat
  Pattern pattern;  ///< final free pattern
  Pattern support;  ///< nonzero structure of P
  double f = 0.0;
  OptimizationReport report;
  std::vector<Round> rounds;
  std::vector<std::string> warnings;
};

/// Solve, drop off-diagonal pairs of S whose entries reached the threshold,
/// and re-solve from the current point on the smaller pattern with a tighter
/// tolerance. Dropped pairs are held at zero afterwards; their mass moves to
/// the diagonal of the same rows before the warm start.
AdaptiveResult adaptive_minimize(const ReversibleChain& chain, const Pattern& S,
                                 const AdaptiveOptions& opts = {});

/// Move the entries of the given pairs to the diagonal, keeping X pihat and
/// symmetry, then restore onto `spec`.
Matrix prune_repair(const Matrix& X, const std::vector<IndexPair>& pairs,
                    const manifold::ManifoldSpec& spec);

const char* solver_name(InnerSolver inner) noexcept;

}  // namespace kemeny::adaptive
