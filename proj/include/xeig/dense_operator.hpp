#pragma once

// Finite dense operators: complex double matrices, optionally backed by an
// exact rational matrix.

#include <xeig/scalar.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xeig {

using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Row-major dense matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  static RationalMatrix identity(Index n) {
    RationalMatrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  Rational& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
  }

  ComplexMatrix to_complex() const {
    ComplexMatrix m(rows_, cols_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
    return m;
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("dimension mismatch in product");
    RationalMatrix c(a.rows_, b.cols_);
    for (Index i = 0; i < a.rows_; ++i)
      for (Index k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (Index j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("dimension mismatch in difference");
    RationalMatrix c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
    return c;
  }
  friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
    RationalMatrix c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = s * a.data_[i];
    return c;
  }
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Rational> data_;
};

/// Square operator on C^dim. Always carries a complex double matrix; when
/// constructed from rationals it also keeps the exact entries.
class DenseOperator {
 public:
  explicit DenseOperator(ComplexMatrix m) : numeric_(std::move(m)) { validate(); }
  explicit DenseOperator(RationalMatrix m) : numeric_(m.to_complex()), rational_(std::move(m)) { validate(); }

  Index dim() const noexcept { return numeric_.rows(); }
  bool exact() const noexcept { return rational_.has_value(); }
  const ComplexMatrix& numeric() const noexcept { return numeric_; }
  const RationalMatrix& rational() const {
    if (!rational_) throw std::logic_error("operator has no exact representation");
    return *rational_;
  }

 private:
  void validate() const {
    if (numeric_.rows() != numeric_.cols()) throw std::invalid_argument("operator must be square");
    if (numeric_.rows() < 1) throw std::invalid_argument("operator dimension must be positive");
    if (!numeric_.allFinite()) throw std::invalid_argument("operator entries must be finite");
  }

  ComplexMatrix numeric_;
  std::optional<RationalMatrix> rational_;
};

/// Spectral norm (largest singular value).
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  const Plain a = m;
  if (a.isZero(0.0)) return 0.0;
  if (a.rows() <= 16 && a.cols() <= 16) return Eigen::JacobiSVD<Plain>(a).singularValues()(0);
  return Eigen::BDCSVD<Plain>(a).singularValues()(0);
}

/// Smallest singular value of a square matrix.
template <typename Derived>
double smallest_singular_value(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  const Plain a = m;
  const auto sv = Eigen::BDCSVD<Plain>(a).singularValues();
  return sv(sv.size() - 1);
}

inline bool is_lower_triangular(const ComplexMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != std::complex<double>{}) return false;
  return true;
}

inline bool is_upper_triangular(const ComplexMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < i && j < m.cols(); ++j)
      if (m(i, j) != std::complex<double>{}) return false;
  return true;
}

}  // namespace xeig
