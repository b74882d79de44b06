// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_METRICS_HPP
#define BGSPIP_METRICS_HPP

#include <cmath>
#include <limits>

#include "linalg.hpp"

namespace bgspip
{

// Stability metrics. Products and differences are formed in double-double
// (inputs widen exactly) and only the final difference matrix is rounded to
// double for the 2-norm.

struct StabilityReport
{
  double loo = 0.0;
  double rel_residual = 0.0;
  double rel_chol_residual = 0.0;
  double kappa = 0.0;
};

namespace detail
{

inline constexpr double metric_nan = std::numeric_limits<double>::quiet_NaN();

template <Scalar T>
bool any_nonfinite(ConstMatrixView<T> A)
{
  for (index_t j = 0; j < A.cols(); ++j)
    for (index_t i = 0; i < A.rows(); ++i)
      if (!std::isfinite(to_double(A(i, j))))
        return true;
  return false;
}

inline Matrix<double> rounded(const Matrix<DoubleDouble>& A)
{
  return convert_matrix<double>(A);
}

/// A^T A in double-double; upper triangle computed, lower mirrored.
inline Matrix<DoubleDouble> gram(const Matrix<DoubleDouble>& A)
{
  const index_t n = A.cols();
  Matrix<DoubleDouble> G(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i <= j; ++i)
    {
      const DoubleDouble* a = A.col(i);
      const DoubleDouble* b = A.col(j);
      DoubleDouble acc(0.0);
      for (index_t l = 0; l < A.rows(); ++l)
        acc += a[l] * b[l];
      G(i, j) = acc;
      G(j, i) = acc;
    }
  return G;
}

} // namespace detail

/// ||I - Q^T Q||_2.
template <Scalar T>
double loss_of_orthogonality(ConstMatrixView<T> Q)
{
  if (detail::any_nonfinite(Q))
    return detail::metric_nan;
  Matrix<DoubleDouble> E = detail::gram(convert_matrix<DoubleDouble>(Q));
  for (index_t j = 0; j < E.cols(); ++j)
    for (index_t i = 0; i < E.rows(); ++i)
      E(i, j) = (i == j ? DoubleDouble(1.0) : DoubleDouble(0.0)) - E(i, j);
  return two_norm<double>(detail::rounded(E).view());
}

template <Scalar T>
double loss_of_orthogonality(const Matrix<T>& Q)
{
  return loss_of_orthogonality<T>(Q.view());
}

/// ||Q R - X||_2 / ||X||_2. A known ||X||_2 may be passed to skip its
/// recomputation.
template <Scalar T, Scalar TX>
double rel_residual(ConstMatrixView<T> Q, ConstMatrixView<T> R, ConstMatrixView<TX> X, double norm_x = -1.0)
{
  require(Q.rows() == X.rows() && R.cols() == X.cols() && Q.cols() == R.rows(), "rel_residual: shape mismatch");
  if (detail::any_nonfinite(Q) || detail::any_nonfinite(R) || detail::any_nonfinite(X))
    return detail::metric_nan;
  const Matrix<DoubleDouble> Xd = convert_matrix<DoubleDouble>(X);
  const Matrix<DoubleDouble> D = minus_product<DoubleDouble>(
      Xd.view(), convert_matrix<DoubleDouble>(Q).view(), convert_matrix<DoubleDouble>(R).view());
  const double nx = norm_x >= 0.0 ? norm_x : two_norm<TX>(X);
  return two_norm<double>(detail::rounded(D).view()) / nx;
}

template <Scalar T, Scalar TX>
double rel_residual(const Matrix<T>& Q, const Matrix<T>& R, const Matrix<TX>& X)
{
  return rel_residual<T, TX>(Q.view(), R.view(), X.view());
}

/// ||X^T X - R^T R||_2 / ||X||_2^2.
template <Scalar T, Scalar TX>
double rel_chol_residual(ConstMatrixView<T> R, ConstMatrixView<TX> X, double norm_x = -1.0)
{
  require(R.rows() == R.cols() && R.cols() == X.cols(), "rel_chol_residual: shape mismatch");
  if (detail::any_nonfinite(R) || detail::any_nonfinite(X))
    return detail::metric_nan;
  Matrix<DoubleDouble> G = detail::gram(convert_matrix<DoubleDouble>(X));
  const Matrix<DoubleDouble> RtR = detail::gram(convert_matrix<DoubleDouble>(R));
  for (index_t j = 0; j < G.cols(); ++j)
    for (index_t i = 0; i < G.rows(); ++i)
      G(i, j) -= RtR(i, j);
  const double nx = norm_x >= 0.0 ? norm_x : two_norm<TX>(X);
  return two_norm<double>(detail::rounded(G).view()) / (nx * nx);
}

template <Scalar T, Scalar TX>
double rel_chol_residual(const Matrix<T>& R, const Matrix<TX>& X)
{
  return rel_chol_residual<T, TX>(R.view(), X.view());
}

/// All three metrics plus kappa(X) (passed in, since callers usually
/// measure it once per test matrix).
template <Scalar T, Scalar TX>
StabilityReport stability_report(const QRFactors<T>& f, const Matrix<TX>& X, double kappa)
{
  StabilityReport r;
  const double nx = two_norm<TX>(X.view());
  r.loo = loss_of_orthogonality<T>(f.Q.view());
  r.rel_residual = rel_residual<T, TX>(f.Q.view(), f.R.view(), X.view(), nx);
  r.rel_chol_residual = rel_chol_residual<T, TX>(f.R.view(), X.view(), nx);
  r.kappa = kappa;
  return r;
}

} // namespace bgspip

#endif
