#include "kemeny/riemannian.hpp"

#include "kemeny/error.hpp"
#include "kemeny/feasibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace kemeny::riemannian {

using manifold::ManifoldSpec;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kMarginCollapse = 1e-3;
constexpr double kNoiseUlps = 64.0;

struct Iterate {
  Matrix X;
  double f = 0.0;
  Matrix grad;  // Riemannian gradient
  double gnorm2 = 0.0;
};

Iterate evaluate(Matrix X, const ManifoldSpec& spec) {
  Iterate it;
  Matrix egrad;
  it.f = manifold::f_and_euclidean_grad(X, spec, egrad);
  it.grad = manifold::riemannian_grad_from(X, egrad, spec);
  it.gnorm2 = manifold::inner(X, it.grad, it.grad);
  it.X = std::move(X);
  return it;
}

struct LineSearch {
  bool ok = false;
  bool certified = false;
  double t = 0.0;
  double f = 0.0;
  Matrix X;
};

bool on_identity_branch(const Matrix& X, const Matrix& dir, double t,
                        const ManifoldSpec& spec) {
  const Matrix& mask = spec.mask();
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      if (mask(i, j) != 0.0 && !(X(i, j) + t * dir(i, j) > 0.0)) return false;
    }
  }
  return true;
}

// Backtracking Armijo test f(R(t dir)) <= reference + c1 t slope.
//
// Once the predicted decrease c1 t |slope| drops below the rounding level of
// f, the comparison of two f values carries no information. f is convex
// along straight lines, so on the identity branch of the retraction
// phi(t) - phi(0) <= t phi'(t); phi'(t) <= c1 slope therefore implies the
// Armijo inequality and is used as the test there instead.
LineSearch armijo_search(const Iterate& cur, const Matrix& dir, double slope,
                         double t0, double reference, const ManifoldSpec& spec,
                         const SolverOptions& opts) {
  LineSearch ls;
  const double noise = kNoiseUlps * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(reference));
  double t = t0;
  for (int k = 0; k <= opts.max_backtracks; ++k, t *= opts.backtrack) {
    Matrix trial;
    double f = std::numeric_limits<double>::infinity();
    try {
      trial = manifold::restore(manifold::retract(cur.X, t * dir, spec), spec);
      f = manifold::f_value(trial, spec);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(f)) continue;
    bool accept = f <= reference + opts.armijo * t * slope;
    bool certified = false;
    if (!accept && opts.armijo * t * -slope < noise && f <= reference + noise &&
        on_identity_branch(cur.X, dir, t, spec)) {
      Matrix egrad;
      manifold::f_and_euclidean_grad(trial, spec, egrad);
      certified = accept = egrad.cwiseProduct(dir).sum() <= opts.armijo * slope;
    }
    if (accept) {
      ls.ok = true;
      ls.certified = certified;
      ls.t = t;
      ls.f = f;
      ls.X = std::move(trial);
      return ls;
    }
  }
  return ls;
}

double capped(double t, const Matrix& X, const Matrix& dir, const ManifoldSpec& spec,
              const SolverOptions& opts) {
  const double margin = manifold::positivity_margin(X, dir, spec);
  if (std::isfinite(margin)) t = std::min(t, opts.margin_fraction * margin);
  return t;
}

class Run {
 public:
  Run(const ManifoldSpec& spec, const SolverOptions& opts, const char* name)
      : spec_(spec), opts_(opts), name_(name), t0_(Clock::now()) {}

  void log(const Iterate& it, double step) {
    trace_.push_back({static_cast<Index>(trace_.size()), it.f, std::sqrt(it.gnorm2),
                      step, std::chrono::duration<double>(Clock::now() - t0_).count()});
  }

  void notify(Index iter, const Iterate& cur, const Matrix& dir, const LineSearch& ls,
              double slope, double reference) const {
    if (opts_.observer) {
      opts_.observer(
          {iter, cur.f, ls.f, ls.t, slope, reference, ls.certified, &ls.X, &cur.X, &dir});
    }
  }

  SolverResult finish(const Iterate& it, Index iterations, ExitReason exit) {
    SolverResult r;
    r.X = it.X;
    r.P = spec_.desymmetrize(it.X);
    r.f = it.f;
    r.grad_norm = std::sqrt(it.gnorm2);
    r.report = evaluate_solution(spec_.chain(), r.P, name_);
    r.report.iterations = iterations;
    r.report.exit = exit;
    r.report.trace = std::move(trace_);
    r.report.seconds = std::chrono::duration<double>(Clock::now() - t0_).count();
    return r;
  }

 private:
  const ManifoldSpec& spec_;
  const SolverOptions& opts_;
  const char* name_;
  Clock::time_point t0_;
  SolverTrace trace_;
};

}  // namespace

void SolverOptions::validate() const {
  const bool ok = tol > 0 && max_iter >= 0 && armijo > 0 && armijo < 1 &&
                  backtrack > 0 && backtrack < 1 && max_backtracks > 0 &&
                  cg_restart >= 0 && bb_window > 0 && bb_min > 0 && bb_max > bb_min &&
                  margin_fraction > 0 && margin_fraction < 1;
  if (!ok) throw Error(ErrorKind::invalid_argument, "invalid Riemannian solver options");
}

double bb_step_length(double ss, double sy, double grad_norm, const SolverOptions& opts) {
  if (sy > 0.0 && std::isfinite(ss / sy)) return std::clamp(ss / sy, opts.bb_min, opts.bb_max);
  return 1.0 / std::max(grad_norm, std::numeric_limits<double>::min());
}

Index tangent_dimension(const ManifoldSpec& spec) {
  return static_cast<Index>(spec.pattern().off_diagonal_count());
}

Matrix default_start(const ManifoldSpec& spec) {
  if (spec.zeroed().off_diagonal_count() != 0) {
    throw Error(ErrorKind::invalid_argument, "default_start needs a spec without zeroed pairs");
  }
  return manifold::restore(
      spec.symmetrize(interior_start(spec.chain(), spec.pattern())), spec);
}

SolverResult riemannian_cg(const ManifoldSpec& spec, const Matrix& x0,
                           const SolverOptions& opts) {
  opts.validate();
  Run run(spec, opts, "riem-cg");
  const Index restart =
      opts.cg_restart > 0 ? opts.cg_restart : std::max<Index>(1, tangent_dimension(spec));
  Iterate cur = evaluate(manifold::restore(x0, spec), spec);
  run.log(cur, 0.0);
  Matrix eta = -cur.grad;
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  Index since_restart = 0;
  ExitReason exit = ExitReason::max_iterations;
  Index k = 0;
  for (; k < opts.max_iter; ++k) {
    if (std::sqrt(cur.gnorm2) <= opts.tol) {
      exit = ExitReason::converged;
      break;
    }
    double slope = manifold::inner(cur.X, cur.grad, eta);
    bool steepest = false;
    if (!(slope < 0.0)) {
      eta = -cur.grad;
      slope = -cur.gnorm2;
      steepest = true;
    }
    auto uncapped = [&](double s) {
      return std::isfinite(f_prev) && f_prev > cur.f ? 2.0 * (f_prev - cur.f) / -s
                                                     : 1.0 / std::sqrt(cur.gnorm2);
    };
    auto initial = [&](double s) { return capped(uncapped(s), cur.X, eta, spec, opts); };
    if (!steepest && initial(slope) < kMarginCollapse * uncapped(slope)) {
      // The mixed direction points hard into an entry that is already
      // vanishing; steepest descent scales with X there and keeps the margin.
      eta = -cur.grad;
      slope = -cur.gnorm2;
      steepest = true;
      since_restart = 0;
    }
    LineSearch ls = armijo_search(cur, eta, slope, initial(slope), cur.f, spec, opts);
    if (!ls.ok && !steepest) {
      eta = -cur.grad;
      slope = -cur.gnorm2;
      ls = armijo_search(cur, eta, slope, initial(slope), cur.f, spec, opts);
      since_restart = 0;
    }
    if (!ls.ok) {
      exit = ExitReason::stagnated;
      break;
    }
    run.notify(k + 1, cur, eta, ls, slope, cur.f);
    f_prev = cur.f;
    Iterate next = evaluate(std::move(ls.X), spec);
    ++since_restart;
    // Fletcher-Reeves (optionally PR clipped to [-FR, FR]), projection as transport.
    double beta = 0.0;
    if (since_restart % restart != 0) {
      beta = next.gnorm2 / cur.gnorm2;
      if (opts.cg_rule == CgRule::hybrid) {
        const double pr = (next.gnorm2 - manifold::inner(next.X, next.grad,
                                                         manifold::project(next.X, cur.grad, spec))) /
                          cur.gnorm2;
        beta = std::max(-beta, std::min(pr, beta));
      }
    }
    Matrix transported = manifold::project(next.X, eta, spec);
    eta = -next.grad + beta * transported;
    if (!(manifold::inner(next.X, eta, -next.grad) > 0.0)) {
      eta = -next.grad;
      since_restart = 0;
    }
    cur = std::move(next);
    run.log(cur, ls.t);
  }
  if (exit == ExitReason::max_iterations && std::sqrt(cur.gnorm2) <= opts.tol) {
    exit = ExitReason::converged;
  }
  return run.finish(cur, k, exit);
}

SolverResult riemannian_bb(const ManifoldSpec& spec, const Matrix& x0,
                           const SolverOptions& opts) {
  opts.validate();
  Run run(spec, opts, "riem-bb");
  Iterate cur = evaluate(manifold::restore(x0, spec), spec);
  run.log(cur, 0.0);
  std::deque<double> window{cur.f};
  double alpha = 1.0 / std::max(std::sqrt(cur.gnorm2), std::numeric_limits<double>::min());
  Iterate best = cur;
  ExitReason exit = ExitReason::max_iterations;
  Index k = 0;
  bool retried = false;
  for (; k < opts.max_iter; ++k) {
    if (std::sqrt(cur.gnorm2) <= opts.tol) {
      exit = ExitReason::converged;
      break;
    }
    const Matrix eta = -cur.grad;
    const double slope = -cur.gnorm2;
    const double reference = *std::max_element(window.begin(), window.end());
    const double t0 = capped(alpha, cur.X, eta, spec, opts);
    LineSearch ls = armijo_search(cur, eta, slope, t0, reference, spec, opts);
    if (!ls.ok) {
      if (!retried) {
        // Monotone restart from the plain steepest-descent scale.
        retried = true;
        window.assign(1, cur.f);
        alpha = 1.0 / std::sqrt(cur.gnorm2);
        continue;
      }
      exit = ExitReason::stagnated;
      break;
    }
    retried = false;
    run.notify(k + 1, cur, eta, ls, slope, reference);
    Iterate next = evaluate(std::move(ls.X), spec);
    const Matrix s = manifold::project(next.X, ls.t * eta, spec);
    const Matrix y = next.grad - manifold::project(next.X, cur.grad, spec);
    const double sy = manifold::inner(next.X, s, y);
    alpha = bb_step_length(manifold::inner(next.X, s, s), sy, std::sqrt(next.gnorm2), opts);
    cur = std::move(next);
    window.push_back(cur.f);
    if (static_cast<int>(window.size()) > opts.bb_window) window.pop_front();
    if (cur.f < best.f) best = cur;
    run.log(cur, ls.t);
  }
  if (exit == ExitReason::converged) return run.finish(cur, k, exit);
  return run.finish(best.f <= cur.f ? best : cur, k, exit);
}

}  // namespace kemeny::riemannian
