#pragma once

// Exact rank and null-space computations over Q.

#include <xeig/dense_operator.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace xeig {

/// Rank by fraction-free (Bareiss) elimination. Rows are first cleared of
/// denominators, which does not change the rank.
inline Index rank(const RationalMatrix& a) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::vector<std::vector<mpz_class>> m(static_cast<std::size_t>(rows), std::vector<mpz_class>(cols));
  for (Index i = 0; i < rows; ++i) {
    mpz_class scale = 1;
    for (Index j = 0; j < cols; ++j) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), a(i, j).get_den_mpz_t());
    for (Index j = 0; j < cols; ++j) m[i][j] = a(i, j).get_num() * (scale / a(i, j).get_den());
  }

  mpz_class previous = 1;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index pivot = r;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    for (Index i = r + 1; i < rows; ++i) {
      for (Index j = c + 1; j < cols; ++j) {
        mpz_class t = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
        m[i][j] = std::move(t);
      }
      m[i][c] = 0;
    }
    previous = m[r][c];
    ++r;
  }
  return r;
}

inline bool is_singular(const RationalMatrix& a) { return rank(a) < std::min(a.rows(), a.cols()); }

/// A non-zero vector v with a v = 0, by reduced row echelon form over Q;
/// nullopt when the kernel is trivial.
inline std::optional<std::vector<Rational>> kernel_vector(const RationalMatrix& a) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  RationalMatrix m = a;
  std::vector<Index> pivot_col;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index pivot = r;
    while (pivot < rows && m(pivot, c) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != r)
      for (Index j = 0; j < cols; ++j) std::swap(m(pivot, j), m(r, j));
    const Rational inv = 1 / m(r, c);
    for (Index j = c; j < cols; ++j) m(r, j) *= inv;
    for (Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (Index j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (r == cols) return std::nullopt;

  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Index c : pivot_col) is_pivot[c] = true;
  Index free = 0;
  while (is_pivot[free]) ++free;

  std::vector<Rational> v(static_cast<std::size_t>(cols));
  v[free] = 1;
  for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m(static_cast<Index>(i), free);
  return v;
}

}  // namespace xeig
