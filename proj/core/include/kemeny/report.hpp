#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/types.hpp"

#include <string>

namespace kemeny {

/// Summary of one optimization run, serialized verbatim by the CLI.
struct OptimizationReport {
  std::string solver;
  double kemeny_before = 0.0;  ///< K(P)
  double kemeny_after = 0.0;   ///< K(X)
  double kirkland_bound = 0.0;
  double stochasticity = 0.0;  ///< ||X1 - 1||_inf
  double stationarity = 0.0;   ///< ||pi^T X - pi^T||_inf
  double reversibility = 0.0;  ///< ||D_pi X - X^T D_pi||_inf
  double distance = 0.0;       ///< ||X - P||_F
  double seconds = 0.0;
  Index iterations = 0;
  std::size_t pattern_size = 0;
  ExitReason exit = ExitReason::converged;
  SolverTrace trace;
};

/// Fills the chain- and X-dependent fields; solver bookkeeping is left to the
/// caller.
OptimizationReport evaluate_solution(const ReversibleChain& chain,
                                     const Matrix& X, std::string solver);

}  // namespace kemeny
