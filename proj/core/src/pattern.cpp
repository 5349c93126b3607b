#include "kemeny/pattern.hpp"

#include "kemeny/error.hpp"

#include <cmath>
#include <string>

namespace kemeny {

Pattern::Pattern(Index n) : n_(n) {
  if (n < 1) {
    throw Error(ErrorKind::invalid_argument, "pattern needs at least one state");
  }
  bits_.assign(static_cast<std::size_t>(n * n), 0);
  for (Index i = 0; i < n; ++i) bits_[offset(i, i)] = 1;
}

Pattern Pattern::full(Index n) {
  Pattern p(n);
  for (auto& b : p.bits_) b = 1;
  p.off_diagonal_ = static_cast<std::size_t>(n * (n - 1) / 2);
  return p;
}

Pattern Pattern::from_matrix(const Matrix& m, double threshold) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::invalid_argument, "pattern source must be square");
  }
  Pattern p(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > threshold || std::abs(m(j, i)) > threshold) {
        p.insert(i, j);
      }
    }
  }
  return p;
}

Pattern Pattern::from_pairs(Index n, const std::vector<IndexPair>& pairs) {
  Pattern p(n);
  for (const auto& [i, j] : pairs) p.insert(i, j);
  return p;
}

std::size_t Pattern::offset(Index i, Index j) const {
  return static_cast<std::size_t>(i * n_ + j);
}

void Pattern::check_index(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw Error(ErrorKind::invalid_argument,
                "pattern index (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") out of range for n = " +
                    std::to_string(n_));
  }
}

bool Pattern::contains(Index i, Index j) const {
  check_index(i, j);
  return bits_[offset(i, j)] != 0;
}

void Pattern::insert(Index i, Index j) {
  check_index(i, j);
  if (bits_[offset(i, j)] == 0) {
    bits_[offset(i, j)] = 1;
    bits_[offset(j, i)] = 1;
    ++off_diagonal_;
  }
}

void Pattern::erase(Index i, Index j) {
  check_index(i, j);
  if (i == j) {
    throw Error(ErrorKind::invalid_argument,
                "self-pairs are part of every pattern and cannot be removed");
  }
  if (bits_[offset(i, j)] != 0) {
    bits_[offset(i, j)] = 0;
    bits_[offset(j, i)] = 0;
    --off_diagonal_;
  }
}

std::size_t Pattern::pair_count() const noexcept {
  return static_cast<std::size_t>(n_) + off_diagonal_;
}

std::vector<IndexPair> Pattern::off_diagonal_pairs() const {
  std::vector<IndexPair> out;
  out.reserve(off_diagonal_);
  for (Index i = 0; i < n_; ++i) {
    for (Index j = i + 1; j < n_; ++j) {
      if (bits_[offset(i, j)] != 0) out.emplace_back(i, j);
    }
  }
  return out;
}

Matrix Pattern::mask() const {
  Matrix m(n_, n_);
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) m(i, j) = bits_[offset(i, j)];
  }
  return m;
}

bool Pattern::is_subset_of(const Pattern& other) const {
  if (n_ != other.n_) return false;
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (bits_[k] != 0 && other.bits_[k] == 0) return false;
  }
  return true;
}

Pattern pattern_union(const Pattern& a, const Pattern& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "pattern sizes differ");
  }
  Pattern out = a;
  for (const auto& [i, j] : b.off_diagonal_pairs()) out.insert(i, j);
  return out;
}

bool check_irreducible(const Pattern& pattern) {
  const Index n = pattern.size();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index reached = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index w = 0; w < n; ++w) {
      if (!seen[static_cast<std::size_t>(w)] && pattern.contains(v, w)) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

bool respects_pattern(const Matrix& m, const Pattern& pattern) {
  if (m.rows() != pattern.size() || m.cols() != pattern.size()) return false;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0 && !pattern.contains(i, j)) return false;
    }
  }
  return true;
}

bool has_exact_pattern(const Matrix& m, const Pattern& pattern,
                       double threshold) {
  if (m.rows() != pattern.size() || m.cols() != pattern.size()) return false;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const bool nonzero = std::abs(m(i, j)) > threshold;
      if (nonzero != pattern.contains(i, j)) return false;
    }
  }
  return true;
}

}  // namespace kemeny
