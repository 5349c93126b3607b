#include "kemeny/experiment.hpp"

#include "kemeny/error.hpp"
#include "kemeny/euclidean.hpp"
#include "kemeny/feasibility.hpp"
#include "kemeny/manifold.hpp"
#include "kemeny/riemannian.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>
#include <tuple>

namespace kemeny::experiment {

namespace {

using json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

ExitReason parse_exit(const std::string& name) {
  for (ExitReason r : {ExitReason::converged, ExitReason::max_iterations, ExitReason::stagnated}) {
    if (name == to_string(r)) return r;
  }
  throw Error(ErrorKind::parse, "unknown exit reason '" + name + "'");
}

json report_json(const OptimizationReport& r) {
  json j;
  j["solver"] = r.solver;
  j["kemeny_before"] = r.kemeny_before;
  j["kemeny_after"] = r.kemeny_after;
  j["kirkland_bound"] = r.kirkland_bound;
  j["stochasticity"] = r.stochasticity;
  j["stationarity"] = r.stationarity;
  j["reversibility"] = r.reversibility;
  j["distance"] = r.distance;
  j["seconds"] = r.seconds;
  j["iterations"] = r.iterations;
  j["pattern_size"] = r.pattern_size;
  j["exit"] = to_string(r.exit);
  return j;
}

}  // namespace

// ---- edge diffs ----

EdgeDiff edge_diff(const Matrix& P, const Matrix& X, double threshold) {
  if (P.rows() != X.rows() || P.cols() != X.cols()) {
    throw Error(ErrorKind::invalid_argument, "edge_diff: size mismatch");
  }
  if (!(threshold >= 0.0)) throw Error(ErrorKind::invalid_argument, "negative diff threshold");
  EdgeDiff diff;
  diff.threshold = threshold;
  for (Index i = 0; i < P.rows(); ++i) {
    for (Index j = 0; j < P.cols(); ++j) {
      const double old_w = P(i, j);
      const double new_w = X(i, j);
      if (!(std::abs(new_w - old_w) > threshold)) continue;
      const EdgeChange c{i, j, old_w, new_w};
      if (old_w > threshold && std::abs(new_w) <= threshold) {
        diff.removed.push_back(c);
      } else if (new_w > old_w) {
        diff.increased.push_back(c);
      } else {
        diff.decreased.push_back(c);
      }
    }
  }
  return diff;
}

Matrix apply_diff(const Matrix& P, const EdgeDiff& diff) {
  Matrix X = P;
  for (const auto* list : {&diff.increased, &diff.decreased, &diff.removed}) {
    for (const EdgeChange& c : *list) X(c.i, c.j) = c.new_weight;
  }
  return X;
}

void write_diff_csv(std::ostream& out, const EdgeDiff& diff) {
  std::vector<EdgeChange> rows;
  rows.reserve(diff.size());
  for (const auto* list : {&diff.increased, &diff.decreased, &diff.removed}) {
    rows.insert(rows.end(), list->begin(), list->end());
  }
  std::sort(rows.begin(), rows.end(), [](const EdgeChange& a, const EdgeChange& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  const auto precision = out.precision(17);
  out << "i,j,old,new,delta\n";
  for (const EdgeChange& c : rows) {
    out << c.i + 1 << ',' << c.j + 1 << ',' << c.old_weight << ',' << c.new_weight << ','
        << c.new_weight - c.old_weight << '\n';
  }
  out.precision(precision);
}

// ---- report and trace serialization ----

std::string report_to_json(const OptimizationReport& report, int indent) {
  return report_json(report).dump(indent);
}

OptimizationReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("report JSON: ") + e.what());
  }
  try {
    OptimizationReport r;
    r.solver = j.at("solver").get<std::string>();
    r.kemeny_before = j.at("kemeny_before").get<double>();
    r.kemeny_after = j.at("kemeny_after").get<double>();
    r.kirkland_bound = j.at("kirkland_bound").get<double>();
    r.stochasticity = j.at("stochasticity").get<double>();
    r.stationarity = j.at("stationarity").get<double>();
    r.reversibility = j.at("reversibility").get<double>();
    r.distance = j.at("distance").get<double>();
    r.seconds = j.at("seconds").get<double>();
    r.iterations = j.at("iterations").get<Index>();
    r.pattern_size = j.at("pattern_size").get<std::size_t>();
    r.exit = parse_exit(j.at("exit").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("report JSON: ") + e.what());
  }
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  const auto precision = out.precision(17);
  out << "iter,f,gradnorm,step,seconds\n";
  for (const TraceRow& r : trace) {
    out << r.iter << ',' << r.f << ',' << r.gradnorm << ',' << r.step << ',' << r.seconds
        << '\n';
  }
  out.precision(precision);
}

// ---- single experiment ----

SolverKind parse_solver(const std::string& name) {
  if (name == "constrained") return SolverKind::constrained;
  if (name == "riem-cg") return SolverKind::riem_cg;
  if (name == "riem-bb") return SolverKind::riem_bb;
  throw Error(ErrorKind::invalid_argument,
              "unknown solver '" + name + "' (constrained, riem-cg or riem-bb)");
}

const char* to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::constrained: return "constrained";
    case SolverKind::riem_cg: return "riem-cg";
    case SolverKind::riem_bb: return "riem-bb";
  }
  return "?";
}

PatternSpec parse_pattern(const std::string& text) {
  if (text == "same") return {PatternChoice::same, {}};
  if (text == "full") return {PatternChoice::full, {}};
  if (text == "plus-diagonal") return {PatternChoice::plus_diagonal, {}};
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    return {PatternChoice::file, text.substr(5)};
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown pattern '" + text + "' (same, full, plus-diagonal or file:<path>)");
}

namespace {

Pattern choose_pattern(const ReversibleChain& chain, const PatternSpec& spec) {
  const Matrix& P = chain.P();
  const Index n = chain.size();
  switch (spec.choice) {
    case PatternChoice::same: {
      std::vector<Index> empty;
      for (Index i = 0; i < n; ++i) {
        if (!(P(i, i) > 0.0)) empty.push_back(i + 1);
      }
      if (!empty.empty()) {
        std::ostringstream msg;
        msg << "pattern 'same' needs a positive diagonal, but P has zero diagonal entries "
               "in row";
        if (empty.size() > 1) msg << 's';
        for (std::size_t k = 0; k < empty.size() && k < 10; ++k) {
          msg << (k ? ", " : " ") << empty[k];
        }
        if (empty.size() > 10) msg << ", ...";
        msg << "; use --pattern plus-diagonal to add the self-loops";
        throw Error(ErrorKind::infeasible, msg.str());
      }
      return Pattern::from_matrix(P);
    }
    case PatternChoice::plus_diagonal: return Pattern::from_matrix(P);
    case PatternChoice::full: return Pattern::full(n);
    case PatternChoice::file: return io::read_pattern(spec.path, n);
  }
  throw Error(ErrorKind::invalid_argument, "unknown pattern choice");
}

}  // namespace

std::pair<ReversibleChain, Pattern> prepare(const ExperimentConfig& config) {
  if (config.generator.has_value() == !config.graph_path.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "an experiment needs exactly one of a graph file and a generator");
  }
  if (config.generator) {
    const GeneratorSource& g = *config.generator;
    GeneratedChain gen = generate_test_chain(g.kind, g.n, g.seed, g.options);
    if (!config.pattern) return {std::move(gen.chain), std::move(gen.pattern)};
    Pattern S = choose_pattern(gen.chain, *config.pattern);
    return {std::move(gen.chain), std::move(S)};
  }
  io::GraphInput g = io::read_graph(config.graph_path, config.format);
  if (config.largest_component) {
    const std::vector<Index> nodes = io::largest_component(g.A);
    if (static_cast<Index>(nodes.size()) < g.A.rows()) g = io::restrict_to(g, nodes);
  }
  ReversibleChain chain = io::chain_from_graph(g);
  Pattern S = choose_pattern(chain, config.pattern.value_or(PatternSpec{}));
  return {std::move(chain), std::move(S)};
}

void check_pattern_feasible(const ReversibleChain& chain, const Pattern& S) {
  if (S.size() != chain.size()) {
    throw Error(ErrorKind::invalid_argument, "pattern size does not match the chain");
  }
  const Matrix P0 = fixed_entries(chain, S);
  std::vector<Index> saturated;
  for (Index i = 0; i < chain.size(); ++i) {
    if (1.0 - P0.row(i).sum() <= 1e-14) saturated.push_back(i + 1);
  }
  if (saturated.empty()) return;
  std::ostringstream msg;
  msg << "infeasible pattern: row";
  if (saturated.size() > 1) msg << 's';
  for (std::size_t k = 0; k < saturated.size() && k < 10; ++k) {
    msg << (k ? ", " : " ") << saturated[k];
  }
  if (saturated.size() > 10) msg << ", ...";
  msg << " of P keep all their mass on entries outside the pattern, which stay fixed, so "
         "the only feasible matrix is P itself; include the self-pair or an edge of those "
         "rows in the pattern";
  throw Error(ErrorKind::infeasible, msg.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  auto [chain, S] = prepare(config);
  check_pattern_feasible(chain, S);
  if (config.adaptive && config.solver == SolverKind::constrained) {
    throw Error(ErrorKind::unsupported,
                "adaptive pruning needs a Riemannian inner solver (riem-cg or riem-bb)");
  }

  std::vector<std::string> warnings;
  Matrix X;
  OptimizationReport report;
  if (config.solver == SolverKind::constrained) {
    ipm::IpmOptions o;
    if (config.tol) o.inner_tol = *config.tol;
    if (config.max_iter) o.max_inner = *config.max_iter;
    ipm::IpmResult r = ipm::solve_constrained(chain, S, o);
    X = std::move(r.X);
    report = std::move(r.report);
  } else if (config.adaptive) {
    adaptive::AdaptiveOptions o;
    o.inner = config.solver == SolverKind::riem_bb ? adaptive::InnerSolver::riem_bb
                                                   : adaptive::InnerSolver::riem_cg;
    if (config.tol) o.schedule.final_tol = *config.tol;
    if (config.max_iter) o.solver.max_iter = *config.max_iter;
    adaptive::AdaptiveResult r = adaptive::adaptive_minimize(chain, S, o);
    warnings = std::move(r.warnings);
    X = std::move(r.P);
    report = std::move(r.report);
  } else {
    const manifold::ManifoldSpec spec(chain, S);
    riemannian::SolverOptions o;
    if (config.tol) o.tol = *config.tol;
    if (config.max_iter) o.max_iter = *config.max_iter;
    const Matrix x0 = config.seed ? manifold::random_point(spec, config.seed)
                                  : riemannian::default_start(spec);
    riemannian::SolverResult r = config.solver == SolverKind::riem_bb
                                     ? riemannian::riemannian_bb(spec, x0, o)
                                     : riemannian::riemannian_cg(spec, x0, o);
    X = std::move(r.P);
    report = std::move(r.report);
  }

  EdgeDiff diff = edge_diff(chain.P(), X, config.diff_threshold);
  if (!config.report_path.empty()) open_out(config.report_path) << report_to_json(report) << '\n';
  if (!config.diff_path.empty()) {
    auto out = open_out(config.diff_path);
    write_diff_csv(out, diff);
  }
  if (!config.trace_path.empty()) {
    auto out = open_out(config.trace_path);
    write_trace_csv(out, report.trace);
  }
  return {std::move(chain), std::move(S), std::move(X), std::move(report), std::move(diff),
          std::move(warnings)};
}

// ---- suite config ----

namespace {

struct Value {
  enum class Type { string, number, boolean, array } type = Type::string;
  std::string text;
  double number = 0.0;
  bool integer = false;
  bool boolean = false;
  std::vector<Value> items;
};

class ConfigParser {
 public:
  ConfigParser(const std::string& source, int line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::parse, source_ + ":" + std::to_string(line_) + ": " + what);
  }

  Value parse_value(const std::string& s, std::size_t& pos) const {
    skip_ws(s, pos);
    if (pos >= s.size()) fail("missing value");
    const char c = s[pos];
    Value v;
    if (c == '"' || c == '\'') {
      const std::size_t end = s.find(c, pos + 1);
      if (end == std::string::npos) fail("unterminated string");
      v.type = Value::Type::string;
      v.text = s.substr(pos + 1, end - pos - 1);
      if (c == '"' && v.text.find('\\') != std::string::npos) fail("escapes are not supported");
      pos = end + 1;
      return v;
    }
    if (c == '[') {
      v.type = Value::Type::array;
      ++pos;
      skip_ws(s, pos);
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return v;
      }
      while (true) {
        Value item = parse_value(s, pos);
        if (item.type == Value::Type::array) fail("nested arrays are not supported");
        v.items.push_back(std::move(item));
        skip_ws(s, pos);
        if (pos >= s.size()) fail("unterminated array");
        if (s[pos] == ',') {
          ++pos;
          skip_ws(s, pos);
          if (pos < s.size() && s[pos] == ']') {
            ++pos;
            return v;
          }
          continue;
        }
        if (s[pos] == ']') {
          ++pos;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != ',' && s[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(s[end]))) {
      ++end;
    }
    const std::string word = s.substr(pos, end - pos);
    pos = end;
    if (word == "true" || word == "false") {
      v.type = Value::Type::boolean;
      v.boolean = word == "true";
      return v;
    }
    std::string digits;
    for (char d : word) {
      if (d != '_') digits += d;
    }
    char* stop = nullptr;
    v.type = Value::Type::number;
    v.number = std::strtod(digits.c_str(), &stop);
    if (digits.empty() || stop != digits.c_str() + digits.size()) {
      fail("cannot parse value '" + word + "'");
    }
    v.integer = digits.find_first_of(".eEiInN") == std::string::npos;
    return v;
  }

  std::string as_string(const Value& v, const std::string& key) const {
    if (v.type != Value::Type::string) fail("'" + key + "' must be a string");
    return v.text;
  }
  double as_number(const Value& v, const std::string& key) const {
    if (v.type != Value::Type::number) fail("'" + key + "' must be a number");
    return v.number;
  }
  std::int64_t as_integer(const Value& v, const std::string& key) const {
    if (v.type != Value::Type::number || !v.integer) fail("'" + key + "' must be an integer");
    return static_cast<std::int64_t>(v.number);
  }
  std::uint64_t as_count(const Value& v, const std::string& key) const {
    const std::int64_t k = as_integer(v, key);
    if (k < 0) fail("'" + key + "' must be nonnegative");
    return static_cast<std::uint64_t>(k);
  }
  bool as_bool(const Value& v, const std::string& key) const {
    if (v.type != Value::Type::boolean) fail("'" + key + "' must be true or false");
    return v.boolean;
  }
  const std::vector<Value>& as_array(const Value& v, const std::string& key) const {
    if (v.type != Value::Type::array) fail("'" + key + "' must be an array");
    return v.items;
  }

  static void skip_ws(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

 private:
  std::string source_;
  int line_;
};

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, k);
    }
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SuiteConfig parse_suite_config(std::istream& in, const std::string& source) {
  SuiteConfig cfg;
  std::optional<std::uint64_t> seed_start;
  std::optional<std::uint64_t> count;
  bool have_seeds = false;
  std::vector<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const ConfigParser p(source, line_no);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[suite]") p.fail("unsupported table " + line + " (only [suite])");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) p.fail("missing key");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      p.fail("duplicate key '" + key + "'");
    }
    seen.push_back(key);
    std::size_t pos = eq + 1;
    const Value v = p.parse_value(line, pos);
    ConfigParser::skip_ws(line, pos);
    if (pos != line.size()) p.fail("trailing characters after value");

    try {
      if (key == "kind") {
        cfg.source.kind = parse_chain_kind(p.as_string(v, key));
      } else if (key == "n") {
        cfg.source.n = static_cast<Index>(p.as_count(v, key));
      } else if (key == "density") {
        cfg.source.options.density = p.as_number(v, key);
      } else if (key == "coupling") {
        cfg.source.options.coupling = p.as_number(v, key);
      } else if (key == "seeds") {
        have_seeds = true;
        for (const Value& item : p.as_array(v, key)) cfg.seeds.push_back(p.as_count(item, key));
      } else if (key == "seed") {
        seed_start = p.as_count(v, key);
      } else if (key == "count") {
        count = p.as_count(v, key);
      } else if (key == "solvers") {
        cfg.solvers.clear();
        for (const Value& item : p.as_array(v, key)) {
          cfg.solvers.push_back(parse_solver(p.as_string(item, key)));
        }
      } else if (key == "adaptive") {
        cfg.adaptive = p.as_bool(v, key);
      } else if (key == "pattern") {
        cfg.pattern = parse_pattern(p.as_string(v, key));
      } else if (key == "tol") {
        cfg.tol = p.as_number(v, key);
      } else if (key == "max_iter") {
        cfg.max_iter = static_cast<int>(p.as_count(v, key));
      } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(p.as_count(v, key));
      } else if (key == "report") {
        cfg.report_path = p.as_string(v, key);
      } else if (key == "table") {
        cfg.table_path = p.as_string(v, key);
      } else {
        p.fail("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::parse) throw;
      p.fail(e.what());
    }
  }
  if (have_seeds && (seed_start || count)) {
    throw Error(ErrorKind::parse, source + ": give either 'seeds' or 'seed'/'count', not both");
  }
  if (!have_seeds) {
    const std::uint64_t first = seed_start.value_or(1);
    for (std::uint64_t k = 0; k < count.value_or(1); ++k) cfg.seeds.push_back(first + k);
  }
  if (cfg.seeds.empty()) throw Error(ErrorKind::parse, source + ": no seeds to run");
  if (cfg.solvers.empty()) throw Error(ErrorKind::parse, source + ": no solvers to run");
  if (cfg.source.n < 2) throw Error(ErrorKind::parse, source + ": n must be at least 2");
  return cfg;
}

SuiteConfig read_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "'");
  return parse_suite_config(in, path);
}

// ---- suite runs ----

namespace {

std::optional<unsigned> env_threads() {
  const char* env = std::getenv("KEMENY_THREADS");
  if (!env) return std::nullopt;
  char* stop = nullptr;
  const long k = std::strtol(env, &stop, 10);
  if (stop == env || *stop != '\0' || k <= 0) return std::nullopt;
  return static_cast<unsigned>(k);
}

}  // namespace

unsigned thread_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return std::min(hw, env_threads().value_or(hw));
}

std::vector<SuiteRow> run_suite(const SuiteConfig& config) {
  const std::size_t jobs = config.seeds.size();
  const std::size_t per = config.solvers.size();
  std::vector<SuiteRow> rows(jobs * per);
  std::vector<std::exception_ptr> errors(jobs);

  auto run_one = [&](std::size_t k) {
    try {
      for (std::size_t s = 0; s < per; ++s) {
        ExperimentConfig ec;
        ec.generator = config.source;
        ec.generator->seed = config.seeds[k];
        ec.pattern = config.pattern;
        ec.solver = config.solvers[s];
        ec.adaptive = config.adaptive;
        ec.tol = config.tol;
        ec.max_iter = config.max_iter;
        ExperimentResult r = run_experiment(ec);
        rows[k * per + s] = {config.seeds[k], r.chain.size(), std::move(r.report)};
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  unsigned threads = thread_cap();
  if (config.threads) threads = std::min(config.threads, env_threads().value_or(config.threads));
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < jobs;) run_one(k);
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (!config.report_path.empty()) open_out(config.report_path) << suite_to_json(rows) << '\n';
  if (!config.table_path.empty()) {
    auto out = open_out(config.table_path);
    write_suite_csv(out, rows);
  }
  return rows;
}

void write_suite_csv(std::ostream& out, const std::vector<SuiteRow>& rows) {
  const auto precision = out.precision(17);
  out << "seed,n,solver,kemeny_before,kemeny_after,kirkland_bound,stochasticity,"
         "stationarity,reversibility,distance,seconds,iterations,pattern_size,exit\n";
  for (const SuiteRow& row : rows) {
    const OptimizationReport& r = row.report;
    out << row.seed << ',' << row.n << ',' << r.solver << ',' << r.kemeny_before << ','
        << r.kemeny_after << ',' << r.kirkland_bound << ',' << r.stochasticity << ','
        << r.stationarity << ',' << r.reversibility << ',' << r.distance << ',' << r.seconds
        << ',' << r.iterations << ',' << r.pattern_size << ',' << to_string(r.exit) << '\n';
  }
  out.precision(precision);
}

std::string suite_to_json(const std::vector<SuiteRow>& rows, int indent) {
  json arr = json::array();
  for (const SuiteRow& row : rows) {
    json j;
    j["seed"] = row.seed;
    j["n"] = row.n;
    j["report"] = report_json(row.report);
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

}  // namespace kemeny::experiment
