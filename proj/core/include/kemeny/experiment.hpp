#pragma once

#include "kemeny/adaptive.hpp"
#include "kemeny/chain.hpp"
#include "kemeny/generators.hpp"
#include "kemeny/io.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/report.hpp"
#include "kemeny/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kemeny::experiment {

// ---- edge diffs ----

struct EdgeChange {
  Index i = 0;
  Index j = 0;
  double old_weight = 0.0;
  double new_weight = 0.0;
};

struct EdgeDiff {
  std::vector<EdgeChange> increased;
  std::vector<EdgeChange> decreased;
  /// old > threshold, |new| <= threshold.
  std::vector<EdgeChange> removed;
  double threshold = 0.0;

  std::size_t size() const noexcept {
    return increased.size() + decreased.size() + removed.size();
  }
};

constexpr double kDiffThreshold = 1e-10;

/// Entries with |X_ij - P_ij| > threshold, in row-major order within each list.
EdgeDiff edge_diff(const Matrix& P, const Matrix& X, double threshold = kDiffThreshold);
/// P with every listed entry set to its new weight.
Matrix apply_diff(const Matrix& P, const EdgeDiff& diff);
/// Header `i,j,old,new,delta`, 1-based indices, rows sorted by (i, j).
void write_diff_csv(std::ostream& out, const EdgeDiff& diff);

// ---- report and trace serialization ----

std::string report_to_json(const OptimizationReport& report, int indent = 2);
/// Inverse of report_to_json (the trace is not part of the JSON).
OptimizationReport report_from_json(const std::string& text);
/// Header `iter,f,gradnorm,step,seconds`.
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

// ---- single experiment ----

enum class PatternChoice { same, full, plus_diagonal, file };
enum class SolverKind { constrained, riem_cg, riem_bb };

SolverKind parse_solver(const std::string& name);
const char* to_string(SolverKind kind) noexcept;

struct PatternSpec {
  PatternChoice choice = PatternChoice::same;
  std::string path;  ///< for file
};

/// "same", "full", "plus-diagonal" or "file:<path>".
PatternSpec parse_pattern(const std::string& text);

struct GeneratorSource {
  ChainKind kind = ChainKind::random_reversible;
  Index n = 10;
  std::uint64_t seed = 1;
  GeneratorOptions options;
};

struct ExperimentConfig {
  /// Exactly one of graph_path and generator.
  std::string graph_path;
  std::optional<io::GraphFormat> format;
  bool largest_component = false;
  std::optional<GeneratorSource> generator;

  /// Generated chains default to their own free pattern unless this is set.
  std::optional<PatternSpec> pattern;
  SolverKind solver = SolverKind::riem_cg;
  bool adaptive = false;
  std::optional<double> tol;
  std::optional<int> max_iter;
  /// Nonzero: Riemannian runs start from a seeded random point of the manifold.
  std::uint64_t seed = 0;
  double diff_threshold = kDiffThreshold;

  std::string report_path;
  std::string diff_path;
  std::string trace_path;
};

struct ExperimentResult {
  ReversibleChain chain;
  Pattern pattern;  ///< free pattern handed to the solver
  Matrix X;         ///< optimized transition matrix
  OptimizationReport report;
  EdgeDiff diff;
  std::vector<std::string> warnings;
};

/// The chain and free pattern a config describes, before any solve.
std::pair<ReversibleChain, Pattern> prepare(const ExperimentConfig& config);

/// Throws infeasible, naming the saturated rows, when the entries of P outside
/// S already sum to one in some row.
void check_pattern_feasible(const ReversibleChain& chain, const Pattern& S);

ExperimentResult run_experiment(const ExperimentConfig& config);

// ---- suites ----

struct SuiteConfig {
  GeneratorSource source;  ///< seed is replaced per run
  std::vector<std::uint64_t> seeds;
  std::vector<SolverKind> solvers = {SolverKind::riem_cg, SolverKind::riem_bb};
  bool adaptive = false;
  std::optional<PatternSpec> pattern;
  std::optional<double> tol;
  std::optional<int> max_iter;
  /// 0: hardware concurrency. Either way KEMENY_THREADS, when set, caps it.
  unsigned threads = 0;
  std::string report_path;  ///< JSON array of rows
  std::string table_path;   ///< CSV of rows
};

struct SuiteRow {
  std::uint64_t seed = 0;
  Index n = 0;
  OptimizationReport report;
};

/// Flat TOML: key = value lines with strings, numbers, booleans and arrays of
/// those, '#' comments, and an optional [suite] table header.
SuiteConfig parse_suite_config(std::istream& in, const std::string& source = "<input>");
SuiteConfig read_suite_config(const std::string& path);

/// Seeds run in parallel; rows come back ordered by seed position, then solver.
std::vector<SuiteRow> run_suite(const SuiteConfig& config);
void write_suite_csv(std::ostream& out, const std::vector<SuiteRow>& rows);
std::string suite_to_json(const std::vector<SuiteRow>& rows, int indent = 2);

/// Hardware concurrency, capped by KEMENY_THREADS when set to a positive integer.
unsigned thread_cap();

}  // namespace kemeny::experiment
