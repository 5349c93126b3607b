#include "kemeny/error.hpp"
#include "kemeny/experiment.hpp"
#include "kemeny/generators.hpp"
#include "kemeny/io.hpp"
#include "kemeny/kemeny.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

using namespace kemeny;

namespace {

struct GraphArgs {
  std::string path;
  std::string format;
  bool largest = false;
};

void add_graph_args(CLI::App* cmd, GraphArgs& g) {
  cmd->add_option("graph", g.path, "Matrix Market file, edge list or dense CSV")->required();
  cmd->add_option("--format", g.format, "mm, edges or csv (default: from the extension)")
      ->check(CLI::IsMember({"mm", "mtx", "edges", "tsv", "csv", "dense"}));
  cmd->add_flag("--largest-component", g.largest, "keep only the largest connected component");
}

std::optional<io::GraphFormat> format_of(const GraphArgs& g) {
  if (g.format.empty()) return std::nullopt;
  return io::parse_format(g.format);
}

ReversibleChain load_chain(const GraphArgs& g) {
  io::GraphInput in = io::read_graph(g.path, format_of(g));
  if (g.largest) {
    const auto nodes = io::largest_component(in.A);
    if (static_cast<Index>(nodes.size()) < in.A.rows()) {
      std::cerr << "largest component: " << nodes.size() << " of " << in.A.rows()
                << " nodes\n";
      in = io::restrict_to(in, nodes);
    }
  }
  return io::chain_from_graph(in);
}

void print_report(const OptimizationReport& r, std::size_t diff_entries) {
  std::cout << std::setprecision(10);
  std::cout << "solver          " << r.solver << '\n'
            << "exit            " << to_string(r.exit) << " after " << r.iterations
            << " iterations\n"
            << "K(P)            " << r.kemeny_before << '\n'
            << "K(X)            " << r.kemeny_after << '\n'
            << "bound           " << r.kirkland_bound << '\n'
            << "stochasticity   " << r.stochasticity << '\n'
            << "stationarity    " << r.stationarity << '\n'
            << "reversibility   " << r.reversibility << '\n'
            << "||X - P||_F     " << r.distance << '\n'
            << "pattern pairs   " << r.pattern_size << '\n'
            << "changed entries " << diff_entries << '\n'
            << "seconds         " << r.seconds << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kemeny constant computation and minimization for reversible Markov chains"};
  app.require_subcommand(1);

  GraphArgs compute_args;
  auto* compute = app.add_subcommand("compute", "Kemeny constant of a chain or random walk");
  add_graph_args(compute, compute_args);

  GraphArgs bound_args;
  auto* bound = app.add_subcommand("bound", "lower bound on the Kemeny constant");
  add_graph_args(bound, bound_args);

  GraphArgs opt_args;
  std::string solver = "riem-cg";
  std::string pattern = "same";
  bool adaptive = false;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::uint64_t seed = 0;
  double diff_threshold = experiment::kDiffThreshold;
  std::string report_path, diff_path, trace_path;
  auto* optimize = app.add_subcommand("optimize", "minimize the Kemeny constant near the chain");
  add_graph_args(optimize, opt_args);
  optimize->add_option("--solver", solver, "constrained, riem-cg or riem-bb")
      ->check(CLI::IsMember({"constrained", "riem-cg", "riem-bb"}))
      ->capture_default_str();
  optimize->add_flag("--adaptive", adaptive, "prune vanishing entries between rounds");
  optimize->add_option("--pattern", pattern, "same, full, plus-diagonal or file:<path>")
      ->capture_default_str();
  optimize->add_option("--tol", tol, "stopping tolerance")->check(CLI::PositiveNumber);
  optimize->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
  optimize->add_option("--seed", seed, "random starting point (0: start at P)");
  optimize->add_option("--diff-threshold", diff_threshold, "smallest change listed in the diff")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  optimize->add_option("--report", report_path, "JSON report");
  optimize->add_option("--diff", diff_path, "CSV of changed entries");
  optimize->add_option("--trace", trace_path, "CSV solver trace");

  std::string kind;
  Index n = 0;
  std::uint64_t gen_seed = 1;
  GeneratorOptions gen_opts;
  std::string gen_out, gen_pattern_out;
  auto* gen = app.add_subcommand("gen", "write a seeded test chain");
  gen->add_option("--kind", kind, "random-reversible, nearly-reducible, random-pattern-subset")
      ->required()
      ->check(CLI::IsMember({"random-reversible", "nearly-reducible", "random-pattern-subset"}));
  gen->add_option("--n", n, "number of states")->required()->check(CLI::Range(2, 100000));
  gen->add_option("--seed", gen_seed, "seed")->capture_default_str();
  gen->add_option("--density", gen_opts.density, "pattern density")->capture_default_str();
  gen->add_option("--coupling", gen_opts.coupling, "off-block mass per row (nearly-reducible)")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Matrix Market output")->required();
  gen->add_option("--pattern-out", gen_pattern_out, "free pattern as a Matrix Market 0/1 file");

  std::string suite_path;
  auto* suite = app.add_subcommand("suite", "run a seeded suite in parallel");
  suite->add_option("--config", suite_path, "suite TOML file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compute) {
      const ReversibleChain chain = load_chain(compute_args);
      std::cout << std::setprecision(12) << "states " << chain.size() << '\n'
                << "kemeny " << kemeny_trace(chain.P()) << '\n';
    } else if (*bound) {
      const ReversibleChain chain = load_chain(bound_args);
      std::cout << std::setprecision(12) << "states " << chain.size() << '\n'
                << "bound  " << kirkland_lower_bound(chain.pi()) << '\n'
                << "kemeny " << kemeny_trace(chain.P()) << '\n';
    } else if (*optimize) {
      experiment::ExperimentConfig cfg;
      cfg.graph_path = opt_args.path;
      cfg.format = format_of(opt_args);
      cfg.largest_component = opt_args.largest;
      cfg.pattern = experiment::parse_pattern(pattern);
      cfg.solver = experiment::parse_solver(solver);
      cfg.adaptive = adaptive;
      cfg.tol = tol;
      cfg.max_iter = max_iter;
      cfg.seed = seed;
      cfg.diff_threshold = diff_threshold;
      cfg.report_path = report_path;
      cfg.diff_path = diff_path;
      cfg.trace_path = trace_path;
      const experiment::ExperimentResult r = experiment::run_experiment(cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      print_report(r.report, r.diff.size());
    } else if (*gen) {
      const GeneratedChain g = generate_test_chain(parse_chain_kind(kind), n, gen_seed, gen_opts);
      io::write_matrix_market(gen_out, g.chain.P(),
                              kind + " n=" + std::to_string(n) + " seed=" + std::to_string(gen_seed));
      if (!gen_pattern_out.empty()) io::write_matrix_market(gen_pattern_out, g.pattern.mask());
      std::cout << std::setprecision(12) << "wrote " << gen_out << " (K = "
                << kemeny_trace(g.chain.P()) << ")\n";
    } else if (*suite) {
      const experiment::SuiteConfig cfg = experiment::read_suite_config(suite_path);
      const auto rows = experiment::run_suite(cfg);
      experiment::write_suite_csv(std::cout, rows);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
