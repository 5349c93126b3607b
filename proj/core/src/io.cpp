#include "kemeny/io.hpp"

#include "kemeny/error.hpp"
#include "kemeny/kemeny.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace kemeny::io {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw Error(ErrorKind::parse, msg.str());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Comma/semicolon separated when the line has one, whitespace otherwise.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find_first_of(",;") != std::string::npos) {
    std::string cur;
    for (char c : line) {
      if (c == ',' || c == ';') {
        out.push_back(trim(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(trim(cur));
    return out;
  }
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

bool to_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

bool to_long(const std::string& s, long long& v) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool comment_or_blank(const std::string& t) {
  return t.empty() || t[0] == '#' || t[0] == '%';
}

GraphInput parse_edge_list(std::istream& in, const std::string& source) {
  struct Edge {
    long long a, b;
    double w;
  };
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (comment_or_blank(t)) continue;
    const auto f = split_fields(t);
    long long a = 0;
    long long b = 0;
    const bool numeric = f.size() >= 2 && to_long(f[0], a) && to_long(f[1], b);
    if (first && !numeric) {
      first = false;
      continue;  // header row
    }
    first = false;
    if (f.size() < 2 || f.size() > 3) {
      parse_error(source, lineno, "expected 'src, dst[, weight]'");
    }
    if (!numeric) parse_error(source, lineno, "non-integer node id");
    if (a < 0 || b < 0) parse_error(source, lineno, "negative node id");
    double w = 1.0;
    if (f.size() == 3 && !to_double(f[2], w)) parse_error(source, lineno, "non-numeric weight");
    if (!(w >= 0.0) || !std::isfinite(w)) parse_error(source, lineno, "weight must be finite and >= 0");
    edges.push_back({a, b, w});
  }
  if (edges.empty()) throw Error(ErrorKind::parse, source + ": no edges");
  long long lo = edges.front().a;
  long long hi = lo;
  for (const Edge& e : edges) {
    lo = std::min({lo, e.a, e.b});
    hi = std::max({hi, e.a, e.b});
  }
  GraphInput g;
  g.format = GraphFormat::edge_list;
  g.index_base = lo == 0 ? 0 : 1;
  const Index n = static_cast<Index>(hi - g.index_base + 1);
  g.A = Matrix::Zero(n, n);
  for (const Edge& e : edges) {
    const Index i = static_cast<Index>(e.a - g.index_base);
    const Index j = static_cast<Index>(e.b - g.index_base);
    g.A(i, j) += e.w;
    if (i != j) g.A(j, i) += e.w;
  }
  for (Index i = 0; i < n; ++i) g.labels.push_back(std::to_string(i + g.index_base));
  return g;
}

GraphInput parse_dense(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (comment_or_blank(t)) continue;
    std::vector<double> row;
    for (const std::string& field : split_fields(t)) {
      double v = 0.0;
      if (!to_double(field, v)) parse_error(source, lineno, "non-numeric field '" + field + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_error(source, lineno, "row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  const Index n = static_cast<Index>(rows.size());
  if (n == 0 || static_cast<Index>(rows.front().size()) != n) {
    throw Error(ErrorKind::parse, source + ": dense matrix must be square and non-empty");
  }
  GraphInput g;
  g.format = GraphFormat::dense_csv;
  g.index_base = 1;
  g.A.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g.A(i, j) = rows[i][j];
  }
  for (Index i = 0; i < n; ++i) g.labels.push_back(std::to_string(i + 1));
  return g;
}

Matrix read_mm(std::istream& in, const std::string& source, bool& symmetric) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, source + ": empty file");
  ++lineno;
  std::istringstream hs(line);
  std::string banner, object, layout, field, symmetry;
  hs >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_error(source, lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") parse_error(source, lineno, "object must be 'matrix'");
  if (layout == "array") {
    throw Error(ErrorKind::unsupported,
                source + ": Matrix Market 'array' format is not supported, use 'coordinate'");
  }
  if (layout != "coordinate") parse_error(source, lineno, "unknown format '" + layout + "'");
  if (field != "real" && field != "integer" && field != "pattern") {
    throw Error(ErrorKind::unsupported, source + ": field '" + field + "' is not supported");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw Error(ErrorKind::unsupported, source + ": symmetry '" + symmetry + "' is not supported");
  }
  symmetric = symmetry == "symmetric";
  const bool pattern = field == "pattern";

  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ss(t);
    std::string a, b, c, extra;
    ss >> a >> b >> c >> extra;
    if (!to_long(a, rows) || !to_long(b, cols) || !to_long(c, nnz) || !extra.empty()) {
      parse_error(source, lineno, "size line must be 'rows cols entries'");
    }
    break;
  }
  if (rows < 0) throw Error(ErrorKind::parse, source + ": missing size line");
  if (rows == 0 || cols == 0 || nnz < 0) parse_error(source, lineno, "invalid dimensions");
  if (symmetric && rows != cols) parse_error(source, lineno, "symmetric matrix must be square");

  Matrix M = Matrix::Zero(rows, cols);
  long long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ss(t);
    std::string si, sj, sv, extra;
    ss >> si >> sj >> sv >> extra;
    long long i = 0, j = 0;
    double v = 1.0;
    if (!to_long(si, i) || !to_long(sj, j)) parse_error(source, lineno, "non-integer index");
    if (pattern ? !sv.empty() : (!to_double(sv, v) || !extra.empty())) {
      parse_error(source, lineno, pattern ? "pattern entries take no value" : "non-numeric value");
    }
    if (i < 1 || i > rows || j < 1 || j > cols) parse_error(source, lineno, "index out of range");
    if (symmetric && j > i) parse_error(source, lineno, "symmetric storage needs row >= column");
    M(i - 1, j - 1) += v;
    if (symmetric && i != j) M(j - 1, i - 1) += v;
    ++seen;
  }
  if (seen != nnz) {
    std::ostringstream msg;
    msg << source << ": expected " << nnz << " entries, found " << seen;
    throw Error(ErrorKind::parse, msg.str());
  }
  return M;
}

}  // namespace

GraphFormat parse_format(const std::string& name) {
  const std::string s = lower(name);
  if (s == "mm" || s == "mtx" || s == "matrix-market") return GraphFormat::matrix_market;
  if (s == "edges" || s == "edge-list" || s == "tsv") return GraphFormat::edge_list;
  if (s == "csv" || s == "dense") return GraphFormat::dense_csv;
  throw Error(ErrorKind::invalid_argument, "unknown graph format '" + name + "'");
}

const char* to_string(GraphFormat format) noexcept {
  switch (format) {
    case GraphFormat::matrix_market: return "mm";
    case GraphFormat::edge_list: return "edges";
    case GraphFormat::dense_csv: return "csv";
  }
  return "?";
}

GraphFormat guess_format(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "mtx" || ext == "mm") return GraphFormat::matrix_market;
  if (ext == "csv") {
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    std::size_t width = 0;
    bool uniform = true;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (comment_or_blank(t)) continue;
      const std::size_t w = split_fields(t).size();
      if (rows == 0) width = w;
      uniform = uniform && w == width;
      ++rows;
    }
    return uniform && rows == width && width > 3 ? GraphFormat::dense_csv : GraphFormat::edge_list;
  }
  return GraphFormat::edge_list;
}

GraphInput parse_graph(std::istream& in, GraphFormat format, const std::string& source) {
  switch (format) {
    case GraphFormat::edge_list: return parse_edge_list(in, source);
    case GraphFormat::dense_csv: return parse_dense(in, source);
    case GraphFormat::matrix_market: break;
  }
  GraphInput g;
  g.format = GraphFormat::matrix_market;
  g.A = read_mm(in, source, g.symmetric_header);
  if (g.A.rows() != g.A.cols()) {
    throw Error(ErrorKind::invalid_argument, source + ": graph matrix must be square");
  }
  for (Index i = 0; i < g.A.rows(); ++i) g.labels.push_back(std::to_string(i + 1));
  return g;
}

GraphInput read_graph(const std::string& path, std::optional<GraphFormat> format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "'");
  return parse_graph(in, format.value_or(guess_format(path)), path);
}

Matrix read_matrix_market(std::istream& in, const std::string& source) {
  bool symmetric = false;
  return read_mm(in, source, symmetric);
}

void write_matrix_market(std::ostream& out, const Matrix& M, const std::string& comment) {
  std::size_t nnz = 0;
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) nnz += M(i, j) != 0.0;
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string line;
    while (std::getline(cs, line)) out << "% " << line << "\n";
  }
  out << M.rows() << " " << M.cols() << " " << nnz << "\n";
  out << std::setprecision(17);
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      if (M(i, j) != 0.0) out << i + 1 << " " << j + 1 << " " << M(i, j) << "\n";
    }
  }
}

void write_matrix_market(const std::string& path, const Matrix& M, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  write_matrix_market(out, M, comment);
}

std::vector<Index> largest_component(const Matrix& A) {
  const Index n = A.rows();
  std::vector<Index> comp(n, -1);
  std::vector<Index> best;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Index> members{s};
    comp[s] = s;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Index u = members[k];
      for (Index v = 0; v < n; ++v) {
        if (comp[v] < 0 && (A(u, v) != 0.0 || A(v, u) != 0.0)) {
          comp[v] = s;
          members.push_back(v);
        }
      }
    }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

GraphInput restrict_to(const GraphInput& g, const std::vector<Index>& nodes) {
  GraphInput out = g;
  const Index m = static_cast<Index>(nodes.size());
  out.A.resize(m, m);
  out.labels.clear();
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) out.A(a, b) = g.A(nodes[a], nodes[b]);
    out.labels.push_back(g.labels.empty() ? std::to_string(nodes[a] + 1) : g.labels[nodes[a]]);
  }
  return out;
}

ReversibleChain random_walk_from_adjacency(const Matrix& A) {
  const Index n = A.rows();
  if (n == 0 || A.cols() != n) throw Error(ErrorKind::invalid_argument, "adjacency must be square");
  if ((A.array() < 0.0).any() || !A.allFinite()) {
    throw Error(ErrorKind::invalid_argument, "adjacency must be finite and nonnegative");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorKind::invalid_argument, "adjacency must be symmetric for a random walk");
  }
  const Vector d = A.rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) {
      throw Error(ErrorKind::not_irreducible,
                  "node " + std::to_string(i + 1) +
                      " is isolated; extract the largest connected component first");
    }
  }
  if (static_cast<Index>(largest_component(A).size()) != n) {
    throw Error(ErrorKind::not_irreducible,
                "graph is disconnected; extract the largest connected component first");
  }
  Matrix P = d.cwiseInverse().asDiagonal() * A;
  Vector pi = d / d.sum();
  return ReversibleChain(std::move(P), std::move(pi));
}

bool is_row_stochastic(const Matrix& M, double tol) {
  if (M.rows() != M.cols() || (M.array() < 0.0).any()) return false;
  return (M.rowwise().sum().array() - 1.0).abs().maxCoeff() <= tol;
}

ReversibleChain chain_from_graph(const GraphInput& g) {
  if (is_row_stochastic(g.A)) return ReversibleChain::from_transition(g.A);
  return random_walk_from_adjacency(g.A);
}

Pattern read_pattern(const std::string& path, Index n, std::optional<GraphFormat> format) {
  const GraphInput g = read_graph(path, format);
  if (g.A.rows() > n) {
    throw Error(ErrorKind::invalid_argument, "pattern file '" + path + "' has more nodes than the chain");
  }
  Matrix M = Matrix::Zero(n, n);
  M.topLeftCorner(g.A.rows(), g.A.cols()) = g.A;
  return Pattern::from_matrix(M);
}

}  // namespace kemeny::io
