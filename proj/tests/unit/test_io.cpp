#include "kemeny/error.hpp"
#include "kemeny/io.hpp"
#include "kemeny/kemeny.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kemeny;
using namespace kemeny::io;
namespace oracle = kemeny::oracle;

namespace {

GraphInput parse(const std::string& text, GraphFormat format) {
  std::istringstream in(text);
  return parse_graph(in, format, "t");
}

ErrorKind kind_of(const std::string& text, GraphFormat format) {
  try {
    parse(text, format);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorKind::invalid_argument;
}

std::string message_of(const std::string& text, GraphFormat format) {
  try {
    parse(text, format);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::path(testing::TempDir()) / name;
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST(MatrixMarket, SymmetricCompletion) {
  const GraphInput g = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1.0\n",
      GraphFormat::matrix_market);
  Matrix expect(2, 2);
  expect << 0, 1, 1, 0;
  EXPECT_EQ(g.A, expect);
  EXPECT_TRUE(g.symmetric_header);
}

TEST(MatrixMarket, GeneralIntegerAndPattern) {
  const GraphInput g = parse(
      "%%MatrixMarket matrix coordinate integer general\n% comment\n3 3 2\n1 2 4\n3 1 7\n",
      GraphFormat::matrix_market);
  EXPECT_EQ(g.A(0, 1), 4.0);
  EXPECT_EQ(g.A(2, 0), 7.0);
  EXPECT_EQ(g.A(1, 0), 0.0);
  const GraphInput p = parse(
      "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n",
      GraphFormat::matrix_market);
  EXPECT_EQ(p.A(0, 1), 1.0);
  EXPECT_EQ(p.A(1, 0), 1.0);
  EXPECT_EQ(p.A(2, 2), 1.0);
}

TEST(MatrixMarket, UnsupportedHeaders) {
  EXPECT_EQ(kind_of("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n",
                    GraphFormat::matrix_market),
            ErrorKind::unsupported);
  EXPECT_NE(message_of("%%MatrixMarket matrix array real general\n2 2\n",
                       GraphFormat::matrix_market)
                .find("array"),
            std::string::npos);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate complex general\n1 1 0\n",
                    GraphFormat::matrix_market),
            ErrorKind::unsupported);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real hermitian\n1 1 0\n",
                    GraphFormat::matrix_market),
            ErrorKind::unsupported);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real skew-symmetric\n1 1 0\n",
                    GraphFormat::matrix_market),
            ErrorKind::unsupported);
}

TEST(MatrixMarket, ParseErrorsNameTheLine) {
  const std::string head = "%%MatrixMarket matrix coordinate real general\n";
  EXPECT_EQ(kind_of("%MatrixMarket matrix coordinate real general\n1 1 0\n",
                    GraphFormat::matrix_market),
            ErrorKind::parse);
  EXPECT_NE(message_of(head + "2 2 1\n1 x 1.0\n", GraphFormat::matrix_market).find("t:3:"),
            std::string::npos);
  EXPECT_NE(message_of(head + "% c\n2 2 1\n1 2 abc\n", GraphFormat::matrix_market).find("t:4:"),
            std::string::npos);
  EXPECT_NE(message_of(head + "2 two 1\n", GraphFormat::matrix_market).find("t:2:"),
            std::string::npos);
  EXPECT_NE(message_of(head + "2 2 1\n3 1 1.0\n", GraphFormat::matrix_market).find("t:3:"),
            std::string::npos);
  EXPECT_EQ(kind_of(head + "2 2 2\n1 1 1.0\n", GraphFormat::matrix_market), ErrorKind::parse);
  EXPECT_NE(message_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n",
                       GraphFormat::matrix_market)
                .find("t:3:"),
            std::string::npos);
}

TEST(EdgeList, PathAndIndexBase) {
  const GraphInput one = parse("1,2\n2,3", GraphFormat::edge_list);
  EXPECT_EQ(one.index_base, 1);
  EXPECT_EQ(one.A, oracle::path_walk(3).cwiseSign());
  const GraphInput zero = parse("0 1\n1\t2\n", GraphFormat::edge_list);
  EXPECT_EQ(zero.index_base, 0);
  EXPECT_EQ(zero.A, one.A);
}

TEST(EdgeList, HeaderCommentsLoopsAndDuplicates) {
  const GraphInput g =
      parse("src,dst,weight\n# comment\n1,2,0.5\n2,1,0.25\n% another\n3,3,2\n2;3;1\n",
            GraphFormat::edge_list);
  ASSERT_EQ(g.A.rows(), 3);
  EXPECT_DOUBLE_EQ(g.A(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(g.A(1, 0), 0.75);
  EXPECT_DOUBLE_EQ(g.A(2, 2), 2.0);
  EXPECT_DOUBLE_EQ(g.A(1, 2), 1.0);
  EXPECT_EQ(g.labels.size(), 3u);
}

TEST(EdgeList, Errors) {
  EXPECT_NE(message_of("1,2\n2,x\n", GraphFormat::edge_list).find("t:2:"), std::string::npos);
  EXPECT_NE(message_of("1,2\n2,3,w\n", GraphFormat::edge_list).find("t:2:"), std::string::npos);
  EXPECT_NE(message_of("1,2\n2,3,-1\n", GraphFormat::edge_list).find("t:2:"), std::string::npos);
  EXPECT_NE(message_of("1,2\n2,3,1,9\n", GraphFormat::edge_list).find("t:2:"), std::string::npos);
  EXPECT_EQ(kind_of("# nothing\n", GraphFormat::edge_list), ErrorKind::parse);
}

TEST(DenseCsv, SquareOnly) {
  const GraphInput g = parse("0,1,0\n1,0,1\n0,1,0\n", GraphFormat::dense_csv);
  EXPECT_EQ(g.A, oracle::path_walk(3).cwiseSign());
  EXPECT_EQ(kind_of("0,1\n1,0\n1,1\n", GraphFormat::dense_csv), ErrorKind::parse);
  EXPECT_NE(message_of("0,1,0\n1,0\n", GraphFormat::dense_csv).find("t:2:"), std::string::npos);
}

TEST(Formats, NamesAndGuessing) {
  EXPECT_EQ(parse_format("mm"), GraphFormat::matrix_market);
  EXPECT_EQ(parse_format("edges"), GraphFormat::edge_list);
  EXPECT_EQ(parse_format("csv"), GraphFormat::dense_csv);
  EXPECT_THROW(parse_format("xml"), Error);
  EXPECT_EQ(guess_format("a.mtx"), GraphFormat::matrix_market);
  EXPECT_EQ(guess_format("a.tsv"), GraphFormat::edge_list);
  const std::string dense = temp_file("dense.csv", "0,1,1,1\n1,0,1,1\n1,1,0,1\n1,1,1,0\n");
  EXPECT_EQ(guess_format(dense), GraphFormat::dense_csv);
  const std::string edges = temp_file("edges.csv", "1,2\n2,3\n3,4\n");
  EXPECT_EQ(guess_format(edges), GraphFormat::edge_list);
  EXPECT_EQ(read_graph(dense).A.rows(), 4);
  EXPECT_EQ(read_graph(edges).A.rows(), 4);
}

TEST(RandomWalk, PathGraph) {
  const ReversibleChain c = random_walk_from_adjacency(oracle::path_walk(3).cwiseSign());
  Matrix P(3, 3);
  P << 0, 1, 0, 0.5, 0, 0.5, 0, 1, 0;
  EXPECT_LE((c.P() - P).cwiseAbs().maxCoeff(), 1e-15);
  Vector pi(3);
  pi << 0.25, 0.5, 0.25;
  EXPECT_LE((c.pi() - pi).cwiseAbs().maxCoeff(), 1e-15);
  const Matrix F = c.pi().asDiagonal() * c.P();
  EXPECT_LE((F - F.transpose()).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(RandomWalk, CompleteGraph) {
  const Index n = 4;
  const Matrix A = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  const ReversibleChain c = random_walk_from_adjacency(A);
  EXPECT_LE((c.P() - A / 3.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((c.pi() - Vector::Constant(n, 0.25)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(kemeny_trace(c.P()), oracle::complete_graph_kemeny(n), 1e-12);
}

TEST(RandomWalk, RejectsIsolatedDisconnectedAndAsymmetric) {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 1) = A(1, 0) = 1.0;
  try {
    random_walk_from_adjacency(A);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_irreducible);
    EXPECT_NE(std::string(e.what()).find("largest"), std::string::npos);
  }
  Matrix B = Matrix::Zero(4, 4);
  B(0, 1) = B(1, 0) = B(2, 3) = B(3, 2) = 1.0;
  try {
    random_walk_from_adjacency(B);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_irreducible);
    EXPECT_NE(std::string(e.what()).find("largest"), std::string::npos);
  }
  Matrix C = oracle::path_walk(3).cwiseSign();
  C(0, 1) = 2.0;
  EXPECT_THROW(random_walk_from_adjacency(C), Error);
}

TEST(RandomWalk, LargestComponent) {
  // Components {0, 2, 4} and {1, 3}.
  Matrix A = Matrix::Zero(5, 5);
  A(0, 2) = A(2, 0) = A(2, 4) = A(4, 2) = 1.0;
  A(1, 3) = A(3, 1) = 1.0;
  EXPECT_EQ(largest_component(A), (std::vector<Index>{0, 2, 4}));
  GraphInput g;
  g.A = A;
  g.labels = {"a", "b", "c", "d", "e"};
  const GraphInput r = restrict_to(g, largest_component(A));
  EXPECT_EQ(r.A, oracle::path_walk(3).cwiseSign());
  EXPECT_EQ(r.labels, (std::vector<std::string>{"a", "c", "e"}));
  EXPECT_NEAR(kemeny_trace(chain_from_graph(r).P()), 1.5, 1e-12);
}

TEST(RoundTrip, KemenyPreserved) {
  oracle::Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const ReversibleChain c = oracle::random_walk_chain(3 + t % 9, 0.4, rng, t % 2 == 0);
    std::stringstream buf;
    write_matrix_market(buf, c.P(), "round trip");
    const GraphInput g = parse_graph(buf, GraphFormat::matrix_market);
    EXPECT_TRUE(is_row_stochastic(g.A));
    const ReversibleChain back = chain_from_graph(g);
    EXPECT_NEAR(kemeny_trace(back.P()), kemeny_trace(c.P()), 1e-12);
    EXPECT_EQ(back.P(), c.P());
  }
}

TEST(RoundTrip, ChainFromGraphUsesRandomWalkForAdjacency) {
  const Matrix A = oracle::path_walk(4).cwiseSign();
  GraphInput g;
  g.A = A;
  EXPECT_FALSE(is_row_stochastic(A));
  EXPECT_LE((chain_from_graph(g).P() - oracle::path_walk(4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PatternFile, ReadsEdges) {
  const std::string path = temp_file("pattern.edges", "1 2\n2 3\n");
  const Pattern S = read_pattern(path, 4);
  EXPECT_EQ(S.size(), 4);
  EXPECT_TRUE(S.contains(0, 1));
  EXPECT_TRUE(S.contains(2, 1));
  EXPECT_FALSE(S.contains(0, 2));
  EXPECT_TRUE(S.contains(3, 3));
  EXPECT_EQ(S.off_diagonal_count(), 2u);
  EXPECT_THROW(read_pattern(path, 2), Error);
}
