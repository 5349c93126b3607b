#include "kemeny/adaptive.hpp"

#include "kemeny/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace kemeny::adaptive {

using manifold::ManifoldSpec;

void AdaptiveSchedule::validate() const {
  const bool ok = initial_tol > 0 && final_tol > 0 && final_tol <= initial_tol &&
                  shrink > 0 && shrink < 1 && threshold >= 0;
  if (!ok) throw Error(ErrorKind::invalid_argument, "invalid adaptive schedule");
}

std::vector<double> AdaptiveSchedule::tolerances() const {
  validate();
  std::vector<double> tols;
  // Relative slack so that 1e-3 * 1e-3 * ... still hits final_tol.
  for (double t = initial_tol; t >= final_tol * (1.0 - 1e-9); t *= shrink) tols.push_back(t);
  return tols;
}

const char* solver_name(InnerSolver inner) noexcept {
  return inner == InnerSolver::riem_bb ? "riem-bb" : "riem-cg";
}

Matrix prune_repair(const Matrix& X, const std::vector<IndexPair>& pairs,
                    const ManifoldSpec& spec) {
  const Vector& ph = spec.pi_hat();
  Matrix Y = X;
  for (const auto& [i, j] : pairs) {
    Y(i, i) += Y(i, j) * ph(j) / ph(i);
    Y(j, j) += Y(j, i) * ph(i) / ph(j);
    Y(i, j) = 0.0;
    Y(j, i) = 0.0;
  }
  return manifold::restore(Y, spec);
}

AdaptiveResult adaptive_minimize(const ReversibleChain& chain, const Pattern& S,
                                 const AdaptiveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> tols = opts.schedule.tolerances();
  opts.solver.validate();
  const Index n = chain.size();

  // Nonzeros of P outside S stay fixed for the whole run.
  Pattern fixed_pattern(n);
  for (const auto& [i, j] : chain.pattern().off_diagonal_pairs()) {
    if (!S.contains(i, j)) fixed_pattern.insert(i, j);
  }

  AdaptiveResult out;
  Pattern free = S;
  Pattern zeroed(n);
  ManifoldSpec spec(chain, free, zeroed);
  Matrix X = riemannian::default_start(spec);
  SolverTrace trace;
  Index iterations = 0;
  ExitReason exit = ExitReason::converged;

  for (double tol : tols) {
    riemannian::SolverOptions so = opts.solver;
    so.tol = tol;
    riemannian::SolverResult r = opts.inner == InnerSolver::riem_bb
                                     ? riemannian::riemannian_bb(spec, X, so)
                                     : riemannian::riemannian_cg(spec, X, so);
    for (TraceRow row : r.report.trace) {
      row.iter = static_cast<Index>(trace.size());
      trace.push_back(row);
    }
    iterations += r.report.iterations;
    exit = r.report.exit;

    Round round;
    round.tol = tol;
    round.f = r.f;
    round.iterations = r.report.iterations;
    round.exit = r.report.exit;
    X = std::move(r.X);

    std::vector<std::pair<double, IndexPair>> candidates;
    for (const auto& [i, j] : free.off_diagonal_pairs()) {
      if (X(i, j) <= opts.schedule.threshold) candidates.push_back({X(i, j), {i, j}});
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [value, pair] : candidates) {
      Pattern trial = free;
      trial.erase(pair.first, pair.second);
      if (!check_irreducible(pattern_union(trial, fixed_pattern))) {
        round.kept.push_back(pair);
        std::ostringstream msg;
        msg << "keeping pair (" << pair.first << ", " << pair.second << ") at " << value
            << ": removing it disconnects the chain";
        out.warnings.push_back(msg.str());
        if (opts.warn) opts.warn(out.warnings.back());
        continue;
      }
      free = std::move(trial);
      zeroed.insert(pair.first, pair.second);
      round.pruned.push_back(pair);
    }
    if (!round.pruned.empty()) {
      spec = ManifoldSpec(chain, free, zeroed);
      X = prune_repair(X, round.pruned, spec);
    }
    round.free_pairs = free.off_diagonal_count();
    out.rounds.push_back(std::move(round));
  }

  out.X = X;
  out.P = spec.desymmetrize(X);
  out.f = manifold::f_value(X, spec);
  out.pattern = free;
  out.support = spec.support();
  out.report = evaluate_solution(chain, out.P,
                                 std::string("adaptive-") + solver_name(opts.inner));
  out.report.iterations = iterations;
  out.report.exit = exit;
  out.report.trace = std::move(trace);
  out.report.pattern_size = out.support.pair_count();
  out.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace kemeny::adaptive
