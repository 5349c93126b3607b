#include "kemeny/report.hpp"

#include "kemeny/kemeny.hpp"

namespace kemeny {

OptimizationReport evaluate_solution(const ReversibleChain& chain,
                                     const Matrix& X, std::string solver) {
  OptimizationReport r;
  r.solver = std::move(solver);
  r.kemeny_before = kemeny_trace(chain.P());
  r.kemeny_after = kemeny_trace(X);
  r.kirkland_bound = kirkland_lower_bound(chain.pi());
  const StructureMetrics m = check_structure(X, chain.pi());
  r.stochasticity = m.stochasticity;
  r.stationarity = m.stationarity;
  r.reversibility = m.reversibility;
  r.distance = (X - chain.P()).norm();
  r.pattern_size = Pattern::from_matrix(X, 0.0).pair_count();
  return r;
}

}  // namespace kemeny
