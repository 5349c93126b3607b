#include "kemeny/euclidean.hpp"

#include "kemeny/error.hpp"
#include "kemeny/feasibility.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace kemeny::ipm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Dense lookup (i, j) -> coordinate index, -1 when not stored.
std::vector<Index> coordinate_index(const CoordinateVariable& v) {
  std::vector<Index> idx(static_cast<std::size_t>(v.n * v.n), -1);
  for (Index q = 0; q < v.size(); ++q) {
    idx[static_cast<std::size_t>(v.rows[q] + v.n * v.cols[q])] = q;
  }
  return idx;
}

// H_s = I - D_pihat (P + Delta) D_pihat^{-1} + pihat pihat^T.
Matrix shifted_symmetrized(const CoordinateVariable& delta,
                           const ReversibleChain& chain) {
  const Index n = chain.size();
  const Vector& ph = chain.pi_hat();
  const Matrix X = chain.P() + delta.to_matrix();
  return Matrix::Identity(n, n) -
         ph.asDiagonal() * X * ph.cwiseInverse().asDiagonal() +
         ph * ph.transpose();
}

Matrix inverse_of(const Matrix& H) {
  Eigen::PartialPivLU<Matrix> lu(H);
  const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot > 1e-14) || !std::isfinite(pivot)) {
    throw Error(ErrorKind::infeasible,
                "H_s(Delta) is singular: the iterate left the feasible region");
  }
  return lu.inverse();
}

double objective_value(const CoordinateVariable& delta,
                       const ReversibleChain& chain) {
  return inverse_of(shifted_symmetrized(delta, chain)).trace() +
         0.5 * delta.values.squaredNorm();
}

}  // namespace

// --- coordinate variable -------------------------------------------------

CoordinateVariable CoordinateVariable::zeros(const Pattern& S) {
  CoordinateVariable v;
  v.n = S.size();
  for (Index j = 0; j < v.n; ++j) {
    for (Index i = 0; i < v.n; ++i) {
      if (S.contains(i, j)) {
        v.rows.push_back(i);
        v.cols.push_back(j);
      }
    }
  }
  v.values = Vector::Zero(static_cast<Index>(v.rows.size()));
  return v;
}

CoordinateVariable CoordinateVariable::gather(const Pattern& S, const Matrix& M) {
  CoordinateVariable v = zeros(S);
  v.values = v.gather(M);
  return v;
}

CoordinateVariable CoordinateVariable::zeros_like() const {
  CoordinateVariable v = *this;
  v.values.setZero();
  return v;
}

Matrix CoordinateVariable::to_matrix() const {
  Matrix M = Matrix::Zero(n, n);
  for (Index q = 0; q < size(); ++q) M(rows[q], cols[q]) = values(q);
  return M;
}

Vector CoordinateVariable::gather(const Matrix& M) const {
  if (M.rows() != n || M.cols() != n) {
    throw Error(ErrorKind::invalid_argument, "gather: matrix has the wrong size");
  }
  Vector out(size());
  for (Index q = 0; q < size(); ++q) out(q) = M(rows[q], cols[q]);
  return out;
}

// --- assembly --------------------------------------------------------------

std::vector<Index> build_commutation(Index n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "commutation size must be >= 1");
  std::vector<Index> perm(static_cast<std::size_t>(n * n));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      perm[static_cast<std::size_t>(j * n + i)] = i * n + j;
    }
  }
  return perm;
}

SparseMatrix commutation_matrix(Index n) {
  const std::vector<Index> perm = build_commutation(n);
  SparseMatrix T(n * n, n * n);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(perm.size());
  for (std::size_t p = 0; p < perm.size(); ++p) {
    t.emplace_back(static_cast<Index>(p), perm[p], 1.0);
  }
  T.setFromTriplets(t.begin(), t.end());
  return T;
}

VectorizedProblem build_constraints(const ReversibleChain& chain,
                                    const Pattern& S) {
  const Index n = chain.size();
  if (S.size() != n) {
    throw Error(ErrorKind::invalid_argument, "pattern and chain sizes differ");
  }
  VectorizedProblem prob;
  prob.layout = CoordinateVariable::gather(S, chain.P());
  const CoordinateVariable& L = prob.layout;
  const Index m = L.size();
  if (m == 0) throw Error(ErrorKind::invalid_argument, "empty pattern");
  const Vector& pi = chain.pi();

  // [1^T (x) I ; I (x) D_pi - (D_pi (x) I) T] restricted to the stored columns.
  std::vector<Eigen::Triplet<double>> ta;
  std::vector<Eigen::Triplet<double>> tg;
  for (Index q = 0; q < m; ++q) {
    const Index a = L.rows[q];
    const Index b = L.cols[q];
    ta.emplace_back(a, q, 1.0);
    if (a != b) {
      ta.emplace_back(n + b * n + a, q, pi(a));
      ta.emplace_back(n + a * n + b, q, -pi(a));
    }
    tg.emplace_back(q, b * n + a, 1.0);
  }
  prob.A.resize(n + n * n, m);
  prob.A.setFromTriplets(ta.begin(), ta.end());
  prob.selection.resize(m, n * n);
  prob.selection.setFromTriplets(tg.begin(), tg.end());
  prob.b = Vector::Zero(n + n * n);
  prob.lower = -L.values;

  const std::vector<Index> idx = coordinate_index(L);
  auto at = [&](Index i, Index j) { return idx[static_cast<std::size_t>(i + n * j)]; };
  const Vector& ph = chain.pi_hat();
  prob.pairs = S.off_diagonal_pairs();
  std::vector<Eigen::Triplet<double>> tn;
  tn.reserve(prob.pairs.size() * 4);
  for (std::size_t u = 0; u < prob.pairs.size(); ++u) {
    const auto [i, j] = prob.pairs[u];
    const double r = ph(j) / ph(i);
    const auto col = static_cast<Index>(u);
    tn.emplace_back(at(i, j), col, r);
    tn.emplace_back(at(i, i), col, -r);
    tn.emplace_back(at(j, i), col, 1.0 / r);
    tn.emplace_back(at(j, j), col, -1.0 / r);
  }
  prob.nullspace.resize(m, static_cast<Index>(prob.pairs.size()));
  prob.nullspace.setFromTriplets(tn.begin(), tn.end());
  return prob;
}

// --- objective -------------------------------------------------------------

ObjectiveGradient objective_and_gradient(const CoordinateVariable& delta,
                                         const ReversibleChain& chain) {
  const Matrix Z1 = inverse_of(shifted_symmetrized(delta, chain));
  const Matrix Z2 = Z1 * Z1;
  const Vector& ph = chain.pi_hat();
  ObjectiveGradient out;
  out.value = Z1.trace() + 0.5 * delta.values.squaredNorm();
  out.gradient.resize(delta.size());
  for (Index q = 0; q < delta.size(); ++q) {
    const Index a = delta.rows[q];
    const Index b = delta.cols[q];
    out.gradient(q) = ph(a) / ph(b) * Z2(b, a) + delta.values(q);
  }
  return out;
}

Matrix hessian(const CoordinateVariable& delta, const ReversibleChain& chain,
               Index cap) {
  const Index m = delta.size();
  if (m > cap) {
    std::ostringstream os;
    os << "Hessian would be " << m << " x " << m << " (cap " << cap
       << "); use the secant Hessian mode";
    throw Error(ErrorKind::resource_limit, os.str());
  }
  const Matrix Z1 = inverse_of(shifted_symmetrized(delta, chain));
  const Matrix Z2 = Z1 * Z1;
  const Vector& ph = chain.pi_hat();
  Vector w(m);
  for (Index q = 0; q < m; ++q) w(q) = ph(delta.rows[q]) / ph(delta.cols[q]);

  // H_pq = Pi_ab Pi_cd (Z1_bc Z2_da + Z2_bc Z1_da) + [p = q], p = (a,b), q = (c,d).
  Matrix H(m, m);
  for (Index q = 0; q < m; ++q) {
    const Index c = delta.rows[q];
    const Index d = delta.cols[q];
    for (Index p = 0; p < m; ++p) {
      const Index a = delta.rows[p];
      const Index b = delta.cols[p];
      H(p, q) = w(p) * w(q) * (Z1(b, c) * Z2(d, a) + Z2(b, c) * Z1(d, a));
    }
    H(q, q) += 1.0;
  }
  return H;
}

// --- NNLS -------------------------------------------------------------------

Vector nnls(const Matrix& C, const Vector& d, int max_iter) {
  const Index p = C.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * p + 10);
  Vector x = Vector::Zero(p);
  std::vector<char> passive(static_cast<std::size_t>(p), 0);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     C.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(p, C.rows()));

  auto solve_passive = [&](Vector& zfull) {
    std::vector<Index> cols;
    for (Index j = 0; j < p; ++j) {
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Matrix Cp(C.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Cp.col(static_cast<Index>(k)) = C.col(cols[k]);
    }
    const Vector zp = Cp.colPivHouseholderQr().solve(d);
    zfull.setZero(p);
    for (std::size_t k = 0; k < cols.size(); ++k) zfull(cols[k]) = zp(static_cast<Index>(k));
  };

  Vector w = C.transpose() * (d - C * x);
  for (int iter = 0; iter < max_iter; ++iter) {
    Index t = -1;
    double best = tol;
    for (Index j = 0; j < p; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = 1;
    Vector z;
    for (int inner = 0; inner < 3 * p + 10; ++inner) {
      solve_passive(z);
      double alpha = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < p; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      if (!std::isfinite(alpha)) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Index j = 0; j < p; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = 0;
          x(j) = 0.0;
        }
      }
    }
    w = C.transpose() * (d - C * x);
  }
  return x;
}

// --- solver ----------------------------------------------------------------

void IpmOptions::validate() const {
  const bool ok = mu0 > 0 && mu_shrink > 0 && mu_shrink < 1 && inner_tol > 0 &&
                  mu_final > 0 && max_outer > 0 && max_inner > 0 &&
                  max_inner_secant > 0 && lbfgs_memory > 0 && hessian_cap > 0 &&
                  fraction_to_boundary > 0 && fraction_to_boundary < 1 &&
                  armijo > 0 && armijo < 1 && max_backtracks > 0;
  if (!ok) throw Error(ErrorKind::invalid_argument, "invalid interior-point options");
}

namespace {

constexpr std::size_t kPrecheckLimit = 400;

struct BarrierState {
  Vector z;
  CoordinateVariable delta;
  Vector slack;  // P + delta on stored coordinates
};

class Barrier {
 public:
  Barrier(const ReversibleChain& chain, const VectorizedProblem& prob)
      : chain_(chain), prob_(prob) {}

  // false when some slack is not strictly positive.
  bool set(BarrierState& st, const Vector& z) const {
    st.z = z;
    st.delta = prob_.layout;
    st.delta.values = prob_.nullspace * z;
    st.slack = st.delta.values - prob_.lower;
    return (st.slack.array() > 0.0).all();
  }

  double phi(const BarrierState& st, double mu) const {
    return objective_value(st.delta, chain_) - mu * st.slack.array().log().sum();
  }

  const VectorizedProblem& problem() const { return prob_; }
  const ReversibleChain& chain() const { return chain_; }

 private:
  const ReversibleChain& chain_;
  const VectorizedProblem& prob_;
};

struct StageOutcome {
  bool converged = false;
  bool stagnated = false;
  double residual = 0.0;
};

struct Progress {
  int inner = 0;
  SolverTrace* trace = nullptr;
  Clock::time_point t0;
  const IpmOptions* opts = nullptr;
};

void record(Progress& pr, const BarrierState& st, double g, double res, double step) {
  ++pr.inner;
  pr.trace->push_back({pr.inner, g, res, step, seconds_since(pr.t0)});
  if (pr.opts->observer) pr.opts->observer(st.delta.values);
}

double max_step_to_boundary(const Vector& slack, const Vector& ddelta, double tau) {
  double amax = std::numeric_limits<double>::infinity();
  for (Index q = 0; q < slack.size(); ++q) {
    if (ddelta(q) < 0.0) amax = std::min(amax, -tau * slack(q) / ddelta(q));
  }
  return amax;
}

// Backtracking from alpha0 on phi; returns the accepted step or 0.
double backtrack(const Barrier& bar, const BarrierState& st, BarrierState& trial,
                 const Vector& dir, double slope, double phi0, double mu,
                 double alpha0, const IpmOptions& opts) {
  double alpha = alpha0;
  for (int k = 0; k < opts.max_backtracks; ++k, alpha *= 0.5) {
    if (!bar.set(trial, st.z + alpha * dir)) continue;
    double phi1 = 0.0;
    try {
      phi1 = bar.phi(trial, mu);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(phi1) && phi1 <= phi0 + opts.armijo * alpha * slope) return alpha;
  }
  return 0.0;
}

StageOutcome newton_stage(const Barrier& bar, BarrierState& st, double mu,
                          double tol, Progress& pr) {
  const IpmOptions& opts = *pr.opts;
  const SparseMatrix& N = bar.problem().nullspace;
  const SparseMatrix Nt = N.transpose();
  StageOutcome out;
  BarrierState trial;
  for (int it = 0; it < opts.max_inner; ++it) {
    const ObjectiveGradient og = objective_and_gradient(st.delta, bar.chain());
    const Vector inv_s = st.slack.cwiseInverse();
    const Vector c = Nt * og.gradient;
    const Vector rg = c - mu * (Nt * inv_s);
    out.residual = rg.lpNorm<Eigen::Infinity>() / (1.0 + c.lpNorm<Eigen::Infinity>());
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    Matrix H = hessian(st.delta, bar.chain(), opts.hessian_cap);
    H.diagonal() += mu * inv_s.cwiseAbs2();
    const Matrix HN = H * N;
    Matrix Hr = Nt * HN;
    Hr = 0.5 * (Hr + Hr.transpose());
    Eigen::LLT<Matrix> llt(Hr);
    double shift = 1e-12 * std::max(1.0, Hr.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success) {
      Matrix reg = Hr;
      reg.diagonal().array() += shift;
      llt.compute(reg);
      shift *= 10.0;
    }
    const Vector dir = -llt.solve(rg);
    const double slope = rg.dot(dir);
    const double phi0 = og.value - mu * st.slack.array().log().sum();
    const Vector ddelta = N * dir;
    const double alpha0 =
        std::min(1.0, max_step_to_boundary(st.slack, ddelta, opts.fraction_to_boundary));
    const double alpha = backtrack(bar, st, trial, dir, slope, phi0, mu, alpha0, opts);
    if (alpha == 0.0) {
      // A vanishing Newton decrement means phi cannot be resolved any further
      // in double precision: the stage is solved to working precision.
      if (-slope / 2.0 > 1e-13 * (1.0 + std::abs(phi0))) {
        out.stagnated = true;
      } else {
        out.converged = true;
      }
      return out;
    }
    st = trial;
    record(pr, st, objective_value(st.delta, bar.chain()), out.residual, alpha);
  }
  return out;
}

StageOutcome secant_stage(const Barrier& bar, BarrierState& st, double mu,
                          double tol, Progress& pr) {
  const IpmOptions& opts = *pr.opts;
  const SparseMatrix& N = bar.problem().nullspace;
  const SparseMatrix Nt = N.transpose();
  StageOutcome out;
  std::deque<std::pair<Vector, Vector>> memory;
  BarrierState trial;

  auto reduced = [&](const BarrierState& s, double& gval, Vector& c) {
    const ObjectiveGradient og = objective_and_gradient(s.delta, bar.chain());
    gval = og.value;
    c = Nt * og.gradient;
    return Vector(c - mu * (Nt * s.slack.cwiseInverse()));
  };

  double gval = 0.0;
  Vector c;
  Vector rg = reduced(st, gval, c);
  for (int it = 0; it < opts.max_inner_secant; ++it) {
    out.residual = rg.lpNorm<Eigen::Infinity>() / (1.0 + c.lpNorm<Eigen::Infinity>());
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    // Two-loop recursion.
    Vector q = rg;
    std::vector<double> a(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, y] = memory[k];
      a[k] = s.dot(q) / y.dot(s);
      q -= a[k] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.squaredNorm();
    } else {
      q /= std::max(1.0, rg.norm());
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double b = y.dot(q) / y.dot(s);
      q += (a[k] - b) * s;
    }
    Vector dir = -q;
    double slope = rg.dot(dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -rg / std::max(1.0, rg.norm());
      slope = rg.dot(dir);
    }
    const double phi0 = gval - mu * st.slack.array().log().sum();
    const double alpha0 = std::min(
        1.0, max_step_to_boundary(st.slack, N * dir, opts.fraction_to_boundary));
    const double alpha = backtrack(bar, st, trial, dir, slope, phi0, mu, alpha0, opts);
    if (alpha == 0.0) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      out.stagnated = true;
      return out;
    }
    double gnew = 0.0;
    Vector cnew;
    const Vector rnew = reduced(trial, gnew, cnew);
    const Vector s = trial.z - st.z;
    const Vector y = rnew - rg;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (static_cast<int>(memory.size()) > opts.lbfgs_memory) memory.pop_front();
    }
    st = trial;
    rg = rnew;
    c = cnew;
    gval = gnew;
    record(pr, st, gval, out.residual, alpha);
  }
  return out;
}

// True when Delta = 0 satisfies the KKT conditions of the bound-constrained
// reduced problem to `tol`.
bool zero_is_kkt_point(const ReversibleChain& chain, const VectorizedProblem& prob,
                       double tol) {
  const SparseMatrix& N = prob.nullspace;
  const Index k = N.cols();
  if (k == 0) return true;
  const ObjectiveGradient og = objective_and_gradient(prob.layout.zeros_like(), chain);
  const Vector c = N.transpose() * og.gradient;
  const double scale = 1.0 + c.lpNorm<Eigen::Infinity>();

  std::vector<Index> active;
  for (Index q = 0; q < prob.m(); ++q) {
    if (prob.lower(q) == 0.0) active.push_back(q);
  }
  // Cheap sign test per column before the NNLS: a column only touching
  // inactive coordinates must have c_u = 0, one with only negative
  // (diagonal) active entries needs c_u <= 0, only positive needs c_u >= 0.
  std::vector<char> is_active(static_cast<std::size_t>(prob.m()), 0);
  for (Index q : active) is_active[static_cast<std::size_t>(q)] = 1;
  for (Index u = 0; u < k; ++u) {
    bool pos = false, neg = false;
    for (SparseMatrix::InnerIterator it(N, u); it; ++it) {
      if (is_active[static_cast<std::size_t>(it.row())]) (it.value() > 0 ? pos : neg) = true;
    }
    const double cu = c(u) / scale;
    if (!pos && !neg && std::abs(cu) > tol) return false;
    if (!pos && neg && cu > tol) return false;
    if (pos && !neg && cu < -tol) return false;
  }
  if (active.empty()) return c.lpNorm<Eigen::Infinity>() / scale <= tol;
  if (active.size() > kPrecheckLimit) return false;

  const Matrix Nd = Matrix(N);
  Matrix C(k, static_cast<Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    C.col(static_cast<Index>(a)) = Nd.row(active[a]).transpose();
  }
  const Vector lambda = nnls(C, c);
  return (C * lambda - c).lpNorm<Eigen::Infinity>() / scale <= tol;
}

}  // namespace

IpmResult solve_constrained(const ReversibleChain& chain, const Pattern& S,
                            const IpmOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  const VectorizedProblem prob = build_constraints(chain, S);
  const Index k = prob.nullspace.cols();
  if (completion_delta_max(chain, S) <= 1e-14) {
    throw Error(ErrorKind::infeasible,
                "degenerate feasible set: ||P^0 1||_inf = 1, so it consists only "
                "of the matrix P and has no strictly feasible point");
  }

  IpmResult result;
  SolverTrace trace;
  auto finish = [&](ExitReason exit) {
    result.report = evaluate_solution(chain, result.X, "constrained");
    result.report.exit = exit;
    result.report.iterations = result.inner_iterations;
    result.report.seconds = seconds_since(t0);
    result.report.trace = std::move(trace);
    return result;
  };

  if (k == 0 || (opts.kkt_precheck && zero_is_kkt_point(chain, prob, opts.inner_tol))) {
    // Feasible set is {P} or P is already optimal.
    result.X = chain.P();
    result.stage_objectives.push_back(
        objective_value(prob.layout.zeros_like(), chain));
    return finish(ExitReason::converged);
  }

  const Matrix X0 = interior_start(chain, S);
  const Matrix D0 = X0 - chain.P();
  const Vector& ph = chain.pi_hat();
  Vector z0(k);
  for (Index u = 0; u < k; ++u) {
    const auto [i, j] = prob.pairs[static_cast<std::size_t>(u)];
    z0(u) = ph(i) * D0(i, j) / ph(j);
  }
  const Barrier bar(chain, prob);
  BarrierState st;
  if (!bar.set(st, z0)) {
    throw Error(ErrorKind::infeasible,
                "no strictly feasible starting point: the feasible set has empty "
                "interior (its only element is P)");
  }

  const bool secant =
      opts.hessian_mode == HessianMode::secant ||
      (opts.hessian_mode == HessianMode::automatic && prob.m() > opts.hessian_cap);
  result.used_secant = secant;

  Progress pr;
  pr.trace = &trace;
  pr.t0 = t0;
  pr.opts = &opts;

  ExitReason exit = ExitReason::converged;
  double mu = opts.mu0;
  StageOutcome last;
  bool reached_final = false;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const double tol = std::max(opts.inner_tol, 0.1 * mu);
    last = secant ? secant_stage(bar, st, mu, tol, pr)
                  : newton_stage(bar, st, mu, tol, pr);
    ++result.outer_iterations;
    result.stage_objectives.push_back(objective_value(st.delta, chain));
    result.kkt_residual = last.residual;
    if (last.stagnated) {
      exit = ExitReason::stagnated;
      break;
    }
    if (mu <= opts.mu_final * (1.0 + 1e-12)) {
      reached_final = true;
      break;
    }
    mu = std::max(mu * opts.mu_shrink, opts.mu_final);
  }
  if (exit != ExitReason::stagnated && (!reached_final || !last.converged)) {
    exit = ExitReason::max_iterations;
  }

  result.inner_iterations = pr.inner;
  result.X = chain.P() + st.delta.to_matrix();
  return finish(exit);
}

}  // namespace kemeny::ipm
