#pragma once

#include "kemeny/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace kemeny {

using IndexPair = std::pair<Index, Index>;

/// Set of unordered index pairs marking admissible nonzero positions of an
/// n x n matrix. Every self-pair {i,i} is always present; membership is
/// symmetric because pairs are unordered.
class Pattern {
 public:
  Pattern() = default;

  /// Diagonal-only pattern on n states.
  explicit Pattern(Index n);

  static Pattern full(Index n);

  /// Pairs {i,j} with |M_ij| > threshold or |M_ji| > threshold, plus all
  /// self-pairs.
  static Pattern from_matrix(const Matrix& m, double threshold = 0.0);

  /// Pairs given as 0-based (i, j); self-pairs are added automatically.
  static Pattern from_pairs(Index n, const std::vector<IndexPair>& pairs);

  Index size() const noexcept { return n_; }

  bool contains(Index i, Index j) const;

  void insert(Index i, Index j);

  /// Removes an off-diagonal pair. Self-pairs cannot be removed.
  void erase(Index i, Index j);

  /// Number of unordered pairs, self-pairs included.
  std::size_t pair_count() const noexcept;
  std::size_t off_diagonal_count() const noexcept { return off_diagonal_; }

  /// Off-diagonal pairs as (i, j) with i < j, in row-major order.
  std::vector<IndexPair> off_diagonal_pairs() const;

  /// 0/1 matrix with ones exactly on the pattern.
  Matrix mask() const;

  bool is_subset_of(const Pattern& other) const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t offset(Index i, Index j) const;
  void check_index(Index i, Index j) const;

  Index n_ = 0;
  std::size_t off_diagonal_ = 0;
  std::vector<std::uint8_t> bits_;
};

Pattern pattern_union(const Pattern& a, const Pattern& b);

/// True iff the undirected graph on the pattern's pairs is connected. For a
/// symmetric pattern this is the same as strong connectivity.
bool check_irreducible(const Pattern& pattern);

/// Entries outside the pattern are exactly zero.
bool respects_pattern(const Matrix& m, const Pattern& pattern);

/// Nonzeros (|m_ij| > threshold) occur exactly on the pattern.
bool has_exact_pattern(const Matrix& m, const Pattern& pattern,
                       double threshold = 0.0);

}  // namespace kemeny
