// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_MATRIX_HPP
#define BGSPIP_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "precision.hpp"

namespace bgspip
{

using index_t = std::ptrdiff_t;

/// Raised when a caller breaks a kernel precondition (shape mismatch,
/// invalid block partition).
class contract_error : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const char* what)
{
  if (!cond)
    throw contract_error(what);
}

template <Scalar T>
class MatrixView;

/// Read-only column-major window into a matrix with leading dimension ld.
template <Scalar T>
class ConstMatrixView
{
public:
  ConstMatrixView(const T* data, index_t rows, index_t cols, index_t ld)
      : data_(data), rows_(rows), cols_(cols), ld_(ld)
  {
  }
  ConstMatrixView(const MatrixView<T>& v) : ConstMatrixView(v.data(), v.rows(), v.cols(), v.ld()) {}

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t ld() const { return ld_; }
  const T* data() const { return data_; }
  const T* col(index_t j) const { return data_ + j * ld_; }

  const T& operator()(index_t i, index_t j) const
  {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[i + j * ld_];
  }

  ConstMatrixView sub(index_t r0, index_t c0, index_t nr, index_t nc) const
  {
    assert(r0 >= 0 && c0 >= 0 && r0 + nr <= rows_ && c0 + nc <= cols_);
    return ConstMatrixView(data_ + r0 + c0 * ld_, nr, nc, ld_);
  }
  ConstMatrixView cols_range(index_t c0, index_t nc) const { return sub(0, c0, rows_, nc); }

private:
  const T* data_;
  index_t rows_, cols_, ld_;
};

/// Mutable column-major window.
template <Scalar T>
class MatrixView
{
public:
  MatrixView(T* data, index_t rows, index_t cols, index_t ld) : data_(data), rows_(rows), cols_(cols), ld_(ld) {}

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t ld() const { return ld_; }
  T* data() const { return data_; }
  T* col(index_t j) const { return data_ + j * ld_; }

  T& operator()(index_t i, index_t j) const
  {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[i + j * ld_];
  }

  MatrixView sub(index_t r0, index_t c0, index_t nr, index_t nc) const
  {
    assert(r0 >= 0 && c0 >= 0 && r0 + nr <= rows_ && c0 + nc <= cols_);
    return MatrixView(data_ + r0 + c0 * ld_, nr, nc, ld_);
  }
  MatrixView cols_range(index_t c0, index_t nc) const { return sub(0, c0, rows_, nc); }

  void assign(ConstMatrixView<T> src) const
  {
    require(src.rows() == rows_ && src.cols() == cols_, "assign: shape mismatch");
    for (index_t j = 0; j < cols_; ++j)
      for (index_t i = 0; i < rows_; ++i)
        (*this)(i, j) = src(i, j);
  }

private:
  T* data_;
  index_t rows_, cols_, ld_;
};

/// Dense column-major matrix owning its storage.
template <Scalar T>
class Matrix
{
public:
  using value_type = T;

  Matrix() = default;
  Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), T(0))
  {
    require(rows >= 0 && cols >= 0, "Matrix: negative dimension");
  }
  explicit Matrix(ConstMatrixView<T> v) : Matrix(v.rows(), v.cols()) { view().assign(v); }

  static Matrix identity(index_t n)
  {
    Matrix I(n, n);
    for (index_t i = 0; i < n; ++i)
      I(i, i) = T(1);
    return I;
  }

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T* col(index_t j) { return data_.data() + j * rows_; }
  const T* col(index_t j) const { return data_.data() + j * rows_; }

  T& operator()(index_t i, index_t j)
  {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[static_cast<std::size_t>(i + j * rows_)];
  }
  const T& operator()(index_t i, index_t j) const
  {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[static_cast<std::size_t>(i + j * rows_)];
  }

  MatrixView<T> view() { return MatrixView<T>(data(), rows_, cols_, rows_); }
  ConstMatrixView<T> view() const { return ConstMatrixView<T>(data(), rows_, cols_, rows_); }
  operator ConstMatrixView<T>() const { return view(); }

  MatrixView<T> sub(index_t r0, index_t c0, index_t nr, index_t nc) { return view().sub(r0, c0, nr, nc); }
  ConstMatrixView<T> sub(index_t r0, index_t c0, index_t nr, index_t nc) const { return view().sub(r0, c0, nr, nc); }
  MatrixView<T> cols_range(index_t c0, index_t nc) { return sub(0, c0, rows_, nc); }
  ConstMatrixView<T> cols_range(index_t c0, index_t nc) const { return sub(0, c0, rows_, nc); }

  bool has_nan() const
  {
    for (const T& x : data_)
      if (scalar_isnan(x))
        return true;
    return false;
  }

  friend bool operator==(const Matrix& a, const Matrix& b)
  {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      return false;
    for (std::size_t k = 0; k < a.data_.size(); ++k)
      if (!(a.data_[k] == b.data_[k]))
        return false;
    return true;
  }

private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<T> data_;
};

/// Element-wise precision change; exact when widening.
template <Scalar To, Scalar From>
Matrix<To> convert_matrix(ConstMatrixView<From> a)
{
  Matrix<To> out(a.rows(), a.cols());
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t i = 0; i < a.rows(); ++i)
      out(i, j) = convert<To>(a(i, j));
  return out;
}

template <Scalar To, Scalar From>
Matrix<To> convert_matrix(const Matrix<From>& a)
{
  return convert_matrix<To, From>(a.view());
}

/// Bit-level equality including NaN payload positions (NaN == NaN here).
template <Scalar T>
bool bitwise_equal(const Matrix<T>& a, const Matrix<T>& b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return false;
  const auto* pa = reinterpret_cast<const unsigned char*>(a.data());
  const auto* pb = reinterpret_cast<const unsigned char*>(b.data());
  for (std::size_t k = 0; k < static_cast<std::size_t>(a.size()) * sizeof(T); ++k)
    if (pa[k] != pb[k])
      return false;
  return true;
}

/// Tall-skinny matrix with an explicit partition into p block vectors of
/// width s.
template <Scalar T>
class BlockMatrix
{
public:
  BlockMatrix(Matrix<T> data, index_t p, index_t s) : data_(std::move(data)), p_(p), s_(s)
  {
    require(p >= 1 && s >= 1, "BlockMatrix: p and s must be positive");
    require(data_.cols() == p * s, "BlockMatrix: column count must equal p*s");
    require(p * s <= data_.rows(), "BlockMatrix: p*s must not exceed the row count");
  }

  index_t rows() const { return data_.rows(); }
  index_t cols() const { return data_.cols(); }
  index_t blocks() const { return p_; }
  index_t block_size() const { return s_; }

  const Matrix<T>& matrix() const { return data_; }
  Matrix<T>& matrix() { return data_; }

  ConstMatrixView<T> block(index_t k) const { return data_.cols_range(k * s_, s_); }
  MatrixView<T> block(index_t k) { return data_.cols_range(k * s_, s_); }

  /// Same columns, different block width.
  BlockMatrix repartition(index_t s) const
  {
    require(s >= 1 && cols() % s == 0, "repartition: block width must divide the column count");
    return BlockMatrix(data_, cols() / s, s);
  }

  template <Scalar To>
  BlockMatrix<To> converted() const
  {
    return BlockMatrix<To>(convert_matrix<To>(data_), p_, s_);
  }

private:
  Matrix<T> data_;
  index_t p_;
  index_t s_;
};

/// Economy QR factors: Q is m x n with (numerically) orthonormal columns and
/// R is n x n upper triangular.
template <Scalar T>
struct QRFactors
{
  Matrix<T> Q;
  Matrix<T> R;
};

template <Scalar T>
bool is_upper_triangular(ConstMatrixView<T> R)
{
  for (index_t j = 0; j < R.cols(); ++j)
    for (index_t i = j + 1; i < R.rows(); ++i)
      if (!(R(i, j) == T(0)))
        return false;
  return true;
}

template <Scalar T>
bool is_upper_triangular(const Matrix<T>& R)
{
  return is_upper_triangular<T>(R.view());
}

} // namespace bgspip

#endif
