#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace kemeny {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Residual threshold applied when validating *inputs* (chains, distributions).
/// Solver outputs are measured and reported, never rejected against it.
inline constexpr double kStructureTolerance = 1e-10;

enum class ExitReason { converged, max_iterations, stagnated };

const char* to_string(ExitReason reason) noexcept;

struct TraceRow {
  Index iter = 0;
  double f = 0.0;
  double gradnorm = 0.0;
  double step = 0.0;
  double seconds = 0.0;
};

using SolverTrace = std::vector<TraceRow>;

}  // namespace kemeny
