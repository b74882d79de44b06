// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_LINALG_HPP
#define BGSPIP_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace bgspip
{

//
// Dense reference kernels. All arithmetic happens in the scalar type T and
// every entry is accumulated in a fixed order, so results are bit-for-bit
// reproducible for a given input and precision.
//

enum class Trans
{
  No,
  Yes
};

/// C = op(A) * B where op is the identity or the transpose. Each entry is a
/// sequential sum over the inner index starting from zero.
template <Scalar T>
Matrix<T> matmul(ConstMatrixView<T> A, Trans ta, ConstMatrixView<T> B)
{
  const index_t m = ta == Trans::Yes ? A.cols() : A.rows();
  const index_t k = ta == Trans::Yes ? A.rows() : A.cols();
  require(k == B.rows(), "matmul: inner dimensions do not agree");
  const index_t n = B.cols();
  Matrix<T> C(m, n);
  if (ta == Trans::Yes)
  {
    for (index_t j = 0; j < n; ++j)
    {
      const T* b = B.col(j);
      for (index_t i = 0; i < m; ++i)
      {
        const T* a = A.col(i);
        T acc(0);
        for (index_t l = 0; l < k; ++l)
          acc += a[l] * b[l];
        C(i, j) = acc;
      }
    }
  }
  else
  {
    // Column sweep; per entry the l-order is the same as the dot form above.
    for (index_t j = 0; j < n; ++j)
    {
      T* c = C.col(j);
      for (index_t l = 0; l < k; ++l)
      {
        const T blj = B(l, j);
        const T* a = A.col(l);
        for (index_t i = 0; i < m; ++i)
          c[i] += a[i] * blj;
      }
    }
  }
  return C;
}

template <Scalar T>
Matrix<T> matmul(const Matrix<T>& A, Trans ta, const Matrix<T>& B)
{
  return matmul<T>(A.view(), ta, B.view());
}

/// X - A*B, with the product formed first.
template <Scalar T>
Matrix<T> minus_product(ConstMatrixView<T> X, ConstMatrixView<T> A, ConstMatrixView<T> B)
{
  Matrix<T> P = matmul<T>(A, Trans::No, B);
  require(P.rows() == X.rows() && P.cols() == X.cols(), "minus_product: shape mismatch");
  for (index_t j = 0; j < X.cols(); ++j)
    for (index_t i = 0; i < X.rows(); ++i)
      P(i, j) = X(i, j) - P(i, j);
  return P;
}

/// Upper Cholesky factor R with R^T R = A, reading only the upper triangle.
/// A non-positive or NaN pivot is square-rooted anyway; the resulting NaN
/// spreads through the rest of the factor but the factorization always runs
/// to completion.
template <Scalar T>
Matrix<T> cholesky_nonstop(ConstMatrixView<T> A)
{
  require(A.rows() == A.cols(), "cholesky_nonstop: matrix must be square");
  const index_t n = A.rows();
  Matrix<T> R(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i <= j; ++i)
      R(i, j) = A(i, j);

  for (index_t k = 0; k < n; ++k)
  {
    const T pivot = scalar_sqrt(R(k, k));
    R(k, k) = pivot;
    for (index_t j = k + 1; j < n; ++j)
      R(k, j) = R(k, j) / pivot;
    for (index_t j = k + 1; j < n; ++j)
      for (index_t i = k + 1; i <= j; ++i)
        R(i, j) -= R(k, i) * R(k, j);
  }
  return R;
}

/// Solves Q * R = V for Q, R upper triangular. Zero or NaN diagonals give
/// Inf/NaN entries rather than an error.
template <Scalar T>
Matrix<T> tri_solve_right(ConstMatrixView<T> V, ConstMatrixView<T> R)
{
  require(R.rows() == R.cols(), "tri_solve_right: R must be square");
  require(V.cols() == R.rows(), "tri_solve_right: shape mismatch");
  const index_t m = V.rows();
  const index_t s = V.cols();
  Matrix<T> Q(m, s);
  for (index_t j = 0; j < s; ++j)
  {
    T* q = Q.col(j);
    for (index_t i = 0; i < m; ++i)
      q[i] = V(i, j);
    for (index_t l = 0; l < j; ++l)
    {
      const T rlj = R(l, j);
      const T* ql = Q.col(l);
      for (index_t i = 0; i < m; ++i)
        q[i] -= ql[i] * rlj;
    }
    const T d = R(j, j);
    for (index_t i = 0; i < m; ++i)
      q[i] = q[i] / d;
  }
  return Q;
}

/// Economy Householder QR, m >= n. The diagonal of R is made nonnegative by
/// flipping the sign of matching rows of R and columns of Q.
template <Scalar T>
QRFactors<T> householder_qr(ConstMatrixView<T> X)
{
  const index_t m = X.rows();
  const index_t n = X.cols();
  require(n >= 1 && m >= n, "householder_qr: requires m >= n >= 1");

  Matrix<T> A(X);
  std::vector<T> tau(static_cast<std::size_t>(n), T(0));

  for (index_t j = 0; j < n; ++j)
  {
    T* a = A.col(j);
    T tail(0);
    for (index_t i = j + 1; i < m; ++i)
      tail += a[i] * a[i];
    const T alpha = a[j];
    if (tail == T(0))
    {
      // Already upper triangular in this column.
      tau[j] = T(0);
      continue;
    }
    const T norm = scalar_sqrt(alpha * alpha + tail);
    const T r = alpha < T(0) ? norm : -norm;
    const T v0 = alpha - r;
    for (index_t i = j + 1; i < m; ++i)
      a[i] = a[i] / v0;
    tau[j] = (r - alpha) / r;
    a[j] = r;

    for (index_t c = j + 1; c < n; ++c)
    {
      T* b = A.col(c);
      T w = b[j];
      for (index_t i = j + 1; i < m; ++i)
        w += a[i] * b[i];
      w = tau[j] * w;
      b[j] -= w;
      for (index_t i = j + 1; i < m; ++i)
        b[i] -= w * a[i];
    }
  }

  QRFactors<T> f{Matrix<T>(m, n), Matrix<T>(n, n)};
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i <= j; ++i)
      f.R(i, j) = A(i, j);

  // Backward accumulation of H_0 ... H_{n-1} applied to the first n columns
  // of the identity.
  for (index_t j = 0; j < n; ++j)
    f.Q(j, j) = T(1);
  for (index_t j = n - 1; j >= 0; --j)
  {
    if (tau[j] == T(0))
      continue;
    const T* v = A.col(j);
    for (index_t c = j; c < n; ++c)
    {
      T* q = f.Q.col(c);
      T w = q[j];
      for (index_t i = j + 1; i < m; ++i)
        w += v[i] * q[i];
      w = tau[j] * w;
      q[j] -= w;
      for (index_t i = j + 1; i < m; ++i)
        q[i] -= w * v[i];
    }
  }

  for (index_t j = 0; j < n; ++j)
  {
    if (f.R(j, j) < T(0))
    {
      for (index_t c = j; c < n; ++c)
        f.R(j, c) = -f.R(j, c);
      T* q = f.Q.col(j);
      for (index_t i = 0; i < m; ++i)
        q[i] = -q[i];
    }
  }
  return f;
}

template <Scalar T>
QRFactors<T> householder_qr(const Matrix<T>& X)
{
  return householder_qr<T>(X.view());
}

/// Singular values in descending order, computed in double by one-sided
/// (Hestenes) Jacobi. Tall inputs are first reduced to their n x n
/// triangular factor by Householder QR.
template <Scalar T>
std::vector<double> singular_values(ConstMatrixView<T> A)
{
  for (index_t j = 0; j < A.cols(); ++j)
    for (index_t i = 0; i < A.rows(); ++i)
      if (!std::isfinite(to_double(A(i, j))))
        throw std::domain_error("norm undefined: matrix has non-finite entries");

  Matrix<double> W;
  {
    Matrix<double> D(A.rows(), A.cols());
    for (index_t j = 0; j < A.cols(); ++j)
      for (index_t i = 0; i < A.rows(); ++i)
        D(i, j) = to_double(A(i, j));
    if (D.rows() < D.cols())
    {
      Matrix<double> Dt(D.cols(), D.rows());
      for (index_t j = 0; j < D.cols(); ++j)
        for (index_t i = 0; i < D.rows(); ++i)
          Dt(j, i) = D(i, j);
      D = std::move(Dt);
    }
    if (D.rows() > D.cols())
      W = householder_qr<double>(D.view()).R;
    else
      W = std::move(D);
  }

  const index_t m = W.rows();
  const index_t n = W.cols();
  const double tol = std::ldexp(1.0, -53) * static_cast<double>(std::max<index_t>(n, 1));
  constexpr int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps; ++sweep)
  {
    bool rotated = false;
    for (index_t i = 0; i < n - 1; ++i)
    {
      for (index_t j = i + 1; j < n; ++j)
      {
        double* wi = W.col(i);
        double* wj = W.col(j);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (index_t r = 0; r < m; ++r)
        {
          alpha += wi[r] * wi[r];
          beta += wj[r] * wj[r];
          gamma += wi[r] * wj[r];
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::abs(zeta) > 1e150 ? 0.5 / zeta
                                                : std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (index_t r = 0; r < m; ++r)
        {
          const double x = wi[r];
          const double y = wj[r];
          wi[r] = c * x - s * y;
          wj[r] = s * x + c * y;
        }
      }
    }
    if (!rotated)
      break;
  }

  std::vector<double> sigma(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j)
  {
    double acc = 0.0;
    const double* w = W.col(j);
    // Scaled sum keeps tiny columns away from underflow.
    double scale = 0.0;
    for (index_t r = 0; r < m; ++r)
      scale = std::max(scale, std::abs(w[r]));
    if (scale > 0.0)
    {
      for (index_t r = 0; r < m; ++r)
      {
        const double x = w[r] / scale;
        acc += x * x;
      }
      sigma[static_cast<std::size_t>(j)] = scale * std::sqrt(acc);
    }
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

template <Scalar T>
std::vector<double> singular_values(const Matrix<T>& A)
{
  return singular_values<T>(A.view());
}

template <Scalar T>
double two_norm(ConstMatrixView<T> A)
{
  const auto sigma = singular_values<T>(A);
  return sigma.empty() ? 0.0 : sigma.front();
}

template <Scalar T>
double two_norm(const Matrix<T>& A)
{
  return two_norm<T>(A.view());
}

/// 2-norm condition number; +inf for a singular matrix.
template <Scalar T>
double cond2(ConstMatrixView<T> A)
{
  const auto sigma = singular_values<T>(A);
  if (sigma.empty() || sigma.back() == 0.0)
    return std::numeric_limits<double>::infinity();
  return sigma.front() / sigma.back();
}

template <Scalar T>
double cond2(const Matrix<T>& A)
{
  return cond2<T>(A.view());
}

} // namespace bgspip

#endif
