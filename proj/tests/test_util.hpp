// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_TESTS_TEST_UTIL_HPP
#define BGSPIP_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "bgspip/bgspip.hpp"

namespace testutil
{

using namespace bgspip;

/// Row-major literal to a column-major matrix.
inline Matrix<double> rows(std::initializer_list<std::initializer_list<double>> r)
{
  const index_t m = static_cast<index_t>(r.size());
  const index_t n = static_cast<index_t>(r.begin()->size());
  Matrix<double> A(m, n);
  index_t i = 0;
  for (const auto& row : r)
  {
    index_t j = 0;
    for (double v : row)
      A(i, j++) = v;
    ++i;
  }
  return A;
}

inline Matrix<double> gaussian(index_t m, index_t n, std::uint64_t seed)
{
  CounterRng rng(seed, 77);
  Matrix<double> A(m, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < m; ++i)
      A(i, j) = rng.normal();
  return A;
}

template <Scalar T>
double max_abs_diff(const Matrix<T>& A, const Matrix<T>& B)
{
  double d = 0.0;
  for (index_t j = 0; j < A.cols(); ++j)
    for (index_t i = 0; i < A.rows(); ++i)
      d = std::max(d, to_double(scalar_abs(A(i, j) - B(i, j))));
  return d;
}

template <Scalar T>
double max_abs(const Matrix<T>& A)
{
  double d = 0.0;
  for (index_t j = 0; j < A.cols(); ++j)
    for (index_t i = 0; i < A.rows(); ++i)
      d = std::max(d, to_double(scalar_abs(A(i, j))));
  return d;
}

inline Matrix<double> diag(std::initializer_list<double> d)
{
  Matrix<double> A(static_cast<index_t>(d.size()), static_cast<index_t>(d.size()));
  index_t i = 0;
  for (double v : d)
  {
    A(i, i) = v;
    ++i;
  }
  return A;
}

/// Flips rows of R (and matching columns of Q) so that diag(R) >= 0.
template <Scalar T>
void normalize_signs(Matrix<T>& Q, Matrix<T>& R)
{
  for (index_t i = 0; i < R.rows(); ++i)
    if (R(i, i) < T(0))
    {
      for (index_t j = 0; j < R.cols(); ++j)
        R(i, j) = -R(i, j);
      for (index_t l = 0; l < Q.rows(); ++l)
        Q(l, i) = -Q(l, i);
    }
}

} // namespace testutil

#endif
