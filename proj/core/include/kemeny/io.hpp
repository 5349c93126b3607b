#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kemeny::io {

enum class GraphFormat { matrix_market, edge_list, dense_csv };

/// "mm", "edges" or "csv".
GraphFormat parse_format(const std::string& name);
const char* to_string(GraphFormat format) noexcept;
/// From the file extension: .mtx/.mm, .csv (dense when every row has the same
/// number of fields as there are rows, else edge list), .tsv/.txt/.edges.
GraphFormat guess_format(const std::string& path);

struct GraphInput {
  Matrix A;  ///< square, nonnegative for adjacency input
  std::vector<std::string> labels;
  GraphFormat format = GraphFormat::matrix_market;
  /// Index base found in an edge list (0 or 1); 1 for Matrix Market.
  int index_base = 1;
  bool symmetric_header = false;
};

/// Edge lists: one edge "src dst [weight]" per line, separated by commas,
/// tabs or spaces; '#' and '%' start comments; a first line with non-numeric
/// src/dst is taken as a header. Edges are undirected, self-loops are kept and
/// duplicate edges are summed.
GraphInput parse_graph(std::istream& in, GraphFormat format,
                       const std::string& source = "<input>");
GraphInput read_graph(const std::string& path, std::optional<GraphFormat> format = {});

/// Coordinate Matrix Market, real/integer/pattern with general/symmetric
/// symmetry. Other headers raise unsupported; malformed content raises parse
/// errors naming the line.
Matrix read_matrix_market(std::istream& in, const std::string& source = "<input>");
/// Coordinate real general, full double precision.
void write_matrix_market(std::ostream& out, const Matrix& M, const std::string& comment = "");
void write_matrix_market(const std::string& path, const Matrix& M,
                         const std::string& comment = "");

/// Nodes of the largest connected component of the graph of A + A^T, in
/// increasing order; ties go to the component holding the smallest node.
std::vector<Index> largest_component(const Matrix& A);
GraphInput restrict_to(const GraphInput& g, const std::vector<Index>& nodes);

/// P = D^{-1} A with d = A1, pi = d / sum(d).
ReversibleChain random_walk_from_adjacency(const Matrix& A);

/// True when every row sums to one within tol and all entries are >= 0.
bool is_row_stochastic(const Matrix& M, double tol = 1e-12);

/// The chain a graph file describes: the matrix itself when it is row
/// stochastic, otherwise the random walk on it.
ReversibleChain chain_from_graph(const GraphInput& g);

/// Pairs of the nonzeros of a pattern file (any supported graph format).
Pattern read_pattern(const std::string& path, Index n,
                     std::optional<GraphFormat> format = {});

}  // namespace kemeny::io
