// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_BGS_HPP
#define BGSPIP_BGS_HPP

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string_view>

#include "intraorth.hpp"

namespace bgspip
{

//
// Block classical Gram-Schmidt with Pythagorean inner products (PIP) and its
// reorthogonalized variants, in uniform and two-precision form.
//
// Sync points are counted structurally: every intraorthogonalization and
// every block inner product (fused or split across two precisions) is one.
//

enum class Algorithm
{
  BcgsPip,
  BcgsPipPlus,
  BcgsPipiPlus,
  BcgsPipMp,
  BcgsPipPlusMp,
  BcgsPipiPlusMp
};

inline constexpr std::array<Algorithm, 6> all_algorithms = {Algorithm::BcgsPip,   Algorithm::BcgsPipPlus,
                                                            Algorithm::BcgsPipiPlus, Algorithm::BcgsPipMp,
                                                            Algorithm::BcgsPipPlusMp, Algorithm::BcgsPipiPlusMp};

inline std::string_view to_string(Algorithm a)
{
  switch (a)
  {
    case Algorithm::BcgsPip:
      return "BCGS_PIP";
    case Algorithm::BcgsPipPlus:
      return "BCGS_PIP+";
    case Algorithm::BcgsPipiPlus:
      return "BCGS_PIPI+";
    case Algorithm::BcgsPipMp:
      return "BCGS_PIP_MP";
    case Algorithm::BcgsPipPlusMp:
      return "BCGS_PIP+_MP";
    case Algorithm::BcgsPipiPlusMp:
      return "BCGS_PIPI+_MP";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name)
{
  for (Algorithm a : all_algorithms)
    if (to_string(a) == name)
      return a;
  return std::nullopt;
}

inline bool is_mixed_precision(Algorithm a)
{
  return a == Algorithm::BcgsPipMp || a == Algorithm::BcgsPipPlusMp || a == Algorithm::BcgsPipiPlusMp;
}

/// The uniform-precision algorithm a two-precision variant reduces to.
inline Algorithm uniform_counterpart(Algorithm a)
{
  switch (a)
  {
    case Algorithm::BcgsPipMp:
      return Algorithm::BcgsPip;
    case Algorithm::BcgsPipPlusMp:
      return Algorithm::BcgsPipPlus;
    case Algorithm::BcgsPipiPlusMp:
      return Algorithm::BcgsPipiPlus;
    default:
      return a;
  }
}

/// Closed-form sync count for p block vectors: p, 2p or 2p - 1.
inline std::size_t expected_sync_points(Algorithm a, index_t p)
{
  const auto n = static_cast<std::size_t>(p);
  switch (uniform_counterpart(a))
  {
    case Algorithm::BcgsPip:
      return n;
    case Algorithm::BcgsPipPlus:
      return 2 * n;
    default:
      return 2 * n - 1;
  }
}

struct RunStats
{
  std::size_t sync_points = 0;
  bool had_nan = false;
  double wall_time = 0.0; // seconds
};

inline std::size_t sync_count(const RunStats& stats) { return stats.sync_points; }

template <Scalar T>
struct BgsResult
{
  QRFactors<T> factors;
  RunStats stats;
};

namespace detail
{

class Stopwatch
{
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <Scalar T>
bool has_nonfinite(const Matrix<T>& A)
{
  for (index_t j = 0; j < A.cols(); ++j)
    for (index_t i = 0; i < A.rows(); ++i)
      if (!std::isfinite(to_double(A(i, j))))
        return true;
  return false;
}

template <Scalar T>
void finish_stats(RunStats& stats, const QRFactors<T>& f, const Stopwatch& clock)
{
  stats.had_nan = has_nonfinite(f.Q) || has_nonfinite(f.R);
  stats.wall_time = clock.seconds();
}

/// chol(sym(P - C^T C)): the Pythagorean diagonal block.
template <Scalar T>
Matrix<T> pythagorean_chol(const Matrix<T>& P, ConstMatrixView<T> C)
{
  Matrix<T> M = P;
  if (C.rows() > 0)
  {
    const Matrix<T> CtC = matmul<T>(C, Trans::Yes, C);
    for (index_t j = 0; j < M.cols(); ++j)
      for (index_t i = 0; i < M.rows(); ++i)
        M(i, j) = P(i, j) - CtC(i, j);
  }
  for (index_t j = 0; j < M.cols(); ++j)
    for (index_t i = 0; i < j; ++i)
    {
      const T avg = (M(i, j) + M(j, i)) * T(0.5);
      M(i, j) = avg;
      M(j, i) = avg;
    }
  return cholesky_nonstop<T>(M.view());
}

/// Product of two upper triangular matrices, summing only the structurally
/// nonzero terms in increasing inner index.
template <Scalar T>
Matrix<T> triangular_product(ConstMatrixView<T> A, ConstMatrixView<T> B)
{
  require(A.rows() == A.cols() && B.rows() == B.cols() && A.cols() == B.rows(), "triangular_product: shape mismatch");
  const index_t n = A.rows();
  Matrix<T> C(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i <= j; ++i)
    {
      T acc(0);
      for (index_t l = i; l <= j; ++l)
        acc += A(i, l) * B(l, j);
      C(i, j) = acc;
    }
  return C;
}

/// S + A * B.
template <Scalar T>
Matrix<T> plus_product(ConstMatrixView<T> S, ConstMatrixView<T> A, ConstMatrixView<T> B)
{
  Matrix<T> P = matmul<T>(A, Trans::No, B);
  for (index_t j = 0; j < P.cols(); ++j)
    for (index_t i = 0; i < P.rows(); ++i)
      P(i, j) = S(i, j) + P(i, j);
  return P;
}

template <Scalar T>
void put(MatrixView<T> dst, const Matrix<T>& src)
{
  dst.assign(src.view());
}

/// Algorithm 1 run in place: on entry W holds the input, on exit the
/// orthonormal basis. Column block k of W holds X_k until iteration k
/// overwrites it with Q_k, so the fused inner product [Q_{k-1} X_k]^T X_k is
/// a single product over the leading (k+1)s columns.
template <Scalar T>
void pip_inplace(Matrix<T>& W, index_t p, index_t s, IntraorthId io, Matrix<T>& R, RunStats& stats)
{
  const index_t n = p * s;
  R = Matrix<T>(n, n);

  {
    QRFactors<T> first = intraorthogonalize<T>(W.cols_range(0, s), io);
    ++stats.sync_points;
    put(W.cols_range(0, s), first.Q);
    put(R.sub(0, 0, s, s), first.R);
  }

  for (index_t k = 1; k < p; ++k)
  {
    const index_t ks = k * s;
    const Matrix<T> Xk(W.cols_range(ks, s));
    const Matrix<T> fused = matmul<T>(W.cols_range(0, ks + s), Trans::Yes, Xk.view());
    ++stats.sync_points;

    const Matrix<T> Rcol(fused.sub(0, 0, ks, s));
    const Matrix<T> Pk(fused.sub(ks, 0, s, s));
    const Matrix<T> Rkk = pythagorean_chol<T>(Pk, Rcol.view());
    const Matrix<T> Vk = minus_product<T>(Xk.view(), W.cols_range(0, ks), Rcol.view());
    const Matrix<T> Qk = tri_solve_right<T>(Vk.view(), Rkk.view());

    put(W.cols_range(ks, s), Qk);
    put(R.sub(0, ks, ks, s), Rcol);
    put(R.sub(ks, ks, s, s), Rkk);
  }
}

/// Algorithm 4 run in place. Low-precision storage in W and R, with the
/// diagonal Gram block, its Cholesky factor and the block-local triangular
/// solve carried out in High. The stored R_kk is the demoted factor.
template <Scalar Low, Scalar High>
void pip_mp_inplace(Matrix<Low>& W, index_t p, index_t s, IntraorthId io, Matrix<Low>& R, RunStats& stats)
{
  const index_t n = p * s;
  R = Matrix<Low>(n, n);

  {
    QRFactors<Low> first = intraorthogonalize<Low>(W.cols_range(0, s), io);
    ++stats.sync_points;
    put(W.cols_range(0, s), first.Q);
    put(R.sub(0, 0, s, s), first.R);
  }

  for (index_t k = 1; k < p; ++k)
  {
    const index_t ks = k * s;
    const Matrix<Low> Xk(W.cols_range(ks, s));
    // Split inner product: one sync point carrying two precisions.
    const Matrix<Low> Rcol = matmul<Low>(W.cols_range(0, ks), Trans::Yes, Xk.view());
    const Matrix<High> Xk_h = convert_matrix<High>(Xk);
    const Matrix<High> Pk = matmul<High>(Xk_h.view(), Trans::Yes, Xk_h.view());
    ++stats.sync_points;

    const Matrix<High> Rkk_h = pythagorean_chol<High>(Pk, convert_matrix<High>(Rcol).view());
    const Matrix<Low> Vk = minus_product<Low>(Xk.view(), W.cols_range(0, ks), Rcol.view());
    const Matrix<High> Qk_h = tri_solve_right<High>(convert_matrix<High>(Vk).view(), Rkk_h.view());

    put(W.cols_range(ks, s), convert_matrix<Low>(Qk_h));
    put(R.sub(0, ks, ks, s), Rcol);
    put(R.sub(ks, ks, s, s), convert_matrix<Low>(Rkk_h));
  }
}

} // namespace detail

/// BCGS-PIP: one IO plus one fused block inner product per remaining block;
/// p sync points.
template <Scalar T>
BgsResult<T> bcgs_pip(const BlockMatrix<T>& X, IntraorthId io)
{
  detail::Stopwatch clock;
  BgsResult<T> out;
  out.factors.Q = X.matrix();
  detail::pip_inplace<T>(out.factors.Q, X.blocks(), X.block_size(), io, out.factors.R, out.stats);
  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// BCGS-PIP+: BCGS-PIP applied twice, R = T S; 2p sync points. The first
/// pass's basis lives in the same workspace the second pass overwrites.
template <Scalar T>
BgsResult<T> bcgs_pip_plus(const BlockMatrix<T>& X, IntraorthId io)
{
  detail::Stopwatch clock;
  BgsResult<T> out;
  Matrix<T>& W = out.factors.Q;
  W = X.matrix();
  Matrix<T> S, Tf;
  detail::pip_inplace<T>(W, X.blocks(), X.block_size(), io, S, out.stats);
  detail::pip_inplace<T>(W, X.blocks(), X.block_size(), io, Tf, out.stats);
  out.factors.R = detail::triangular_product<T>(Tf.view(), S.view());
  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// BCGS-PIPI+: both PIP passes fused into one loop over the blocks; the
/// first block is intraorthogonalized once only. 2p - 1 sync points.
template <Scalar T>
BgsResult<T> bcgs_pipi_plus(const BlockMatrix<T>& X, IntraorthId io)
{
  using detail::put;
  detail::Stopwatch clock;
  const index_t p = X.blocks();
  const index_t s = X.block_size();
  const index_t n = p * s;

  BgsResult<T> out;
  Matrix<T>& W = out.factors.Q;
  Matrix<T>& R = out.factors.R;
  W = X.matrix();
  R = Matrix<T>(n, n);

  {
    QRFactors<T> first = intraorthogonalize<T>(W.cols_range(0, s), io);
    ++out.stats.sync_points;
    put(W.cols_range(0, s), first.Q);
    put(R.sub(0, 0, s, s), first.R);
  }

  for (index_t k = 1; k < p; ++k)
  {
    const index_t ks = k * s;

    // First PIP step.
    const Matrix<T> Xk(W.cols_range(ks, s));
    const Matrix<T> fused1 = matmul<T>(W.cols_range(0, ks + s), Trans::Yes, Xk.view());
    ++out.stats.sync_points;
    const Matrix<T> Scol(fused1.sub(0, 0, ks, s));
    const Matrix<T> Omega(fused1.sub(ks, 0, s, s));
    const Matrix<T> Skk = detail::pythagorean_chol<T>(Omega, Scol.view());
    const Matrix<T> Vk = minus_product<T>(Xk.view(), W.cols_range(0, ks), Scol.view());
    put(W.cols_range(ks, s), tri_solve_right<T>(Vk.view(), Skk.view()));

    // Second PIP step, on U_k now sitting in block k of W.
    const Matrix<T> Uk(W.cols_range(ks, s));
    const Matrix<T> fused2 = matmul<T>(W.cols_range(0, ks + s), Trans::Yes, Uk.view());
    ++out.stats.sync_points;
    const Matrix<T> Tcol(fused2.sub(0, 0, ks, s));
    const Matrix<T> Pk(fused2.sub(ks, 0, s, s));
    const Matrix<T> Tkk = detail::pythagorean_chol<T>(Pk, Tcol.view());
    const Matrix<T> Wk = minus_product<T>(Uk.view(), W.cols_range(0, ks), Tcol.view());
    put(W.cols_range(ks, s), tri_solve_right<T>(Wk.view(), Tkk.view()));

    put(R.sub(0, ks, ks, s), detail::plus_product<T>(Scol.view(), Tcol.view(), Skk.view()));
    put(R.sub(ks, ks, s, s), detail::triangular_product<T>(Tkk.view(), Skk.view()));
  }

  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// Two-precision BCGS-PIP. Data, Q and R are held in Low; X_k^T X_k, the
/// Cholesky factor and the block-local triangular solve are computed in
/// High. p sync points.
template <Scalar Low, Scalar High>
  requires(precision_traits<Low>::rank <= precision_traits<High>::rank)
BgsResult<Low> bcgs_pip_mp(const BlockMatrix<Low>& X, IntraorthId io)
{
  detail::Stopwatch clock;
  BgsResult<Low> out;
  out.factors.Q = X.matrix();
  detail::pip_mp_inplace<Low, High>(out.factors.Q, X.blocks(), X.block_size(), io, out.factors.R, out.stats);
  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// Two-precision BCGS-PIP+: two mixed passes, R = T S formed in Low.
template <Scalar Low, Scalar High>
  requires(precision_traits<Low>::rank <= precision_traits<High>::rank)
BgsResult<Low> bcgs_pip_plus_mp(const BlockMatrix<Low>& X, IntraorthId io)
{
  detail::Stopwatch clock;
  BgsResult<Low> out;
  Matrix<Low>& W = out.factors.Q;
  W = X.matrix();
  Matrix<Low> S, Tf;
  detail::pip_mp_inplace<Low, High>(W, X.blocks(), X.block_size(), io, S, out.stats);
  detail::pip_mp_inplace<Low, High>(W, X.blocks(), X.block_size(), io, Tf, out.stats);
  out.factors.R = detail::triangular_product<Low>(Tf.view(), S.view());
  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// Two-precision BCGS-PIPI+. Block inner products against the basis and all
/// m x s updates run in Low; the diagonal Gram blocks, both Cholesky factors,
/// the triangular solves and T_kk S_kk run in High.
template <Scalar Low, Scalar High>
  requires(precision_traits<Low>::rank <= precision_traits<High>::rank)
BgsResult<Low> bcgs_pipi_plus_mp(const BlockMatrix<Low>& X, IntraorthId io)
{
  using detail::put;
  detail::Stopwatch clock;
  const index_t p = X.blocks();
  const index_t s = X.block_size();
  const index_t n = p * s;

  BgsResult<Low> out;
  Matrix<Low>& W = out.factors.Q;
  Matrix<Low>& R = out.factors.R;
  W = X.matrix();
  R = Matrix<Low>(n, n);

  {
    QRFactors<Low> first = intraorthogonalize<Low>(W.cols_range(0, s), io);
    ++out.stats.sync_points;
    put(W.cols_range(0, s), first.Q);
    put(R.sub(0, 0, s, s), first.R);
  }

  for (index_t k = 1; k < p; ++k)
  {
    const index_t ks = k * s;

    const Matrix<Low> Xk(W.cols_range(ks, s));
    const Matrix<Low> Scol = matmul<Low>(W.cols_range(0, ks), Trans::Yes, Xk.view());
    const Matrix<High> Xk_h = convert_matrix<High>(Xk);
    const Matrix<High> Omega = matmul<High>(Xk_h.view(), Trans::Yes, Xk_h.view());
    ++out.stats.sync_points;
    const Matrix<High> Skk_h = detail::pythagorean_chol<High>(Omega, convert_matrix<High>(Scol).view());
    const Matrix<Low> Vk = minus_product<Low>(Xk.view(), W.cols_range(0, ks), Scol.view());
    const Matrix<Low> Uk = convert_matrix<Low>(tri_solve_right<High>(convert_matrix<High>(Vk).view(), Skk_h.view()));

    const Matrix<Low> Tcol = matmul<Low>(W.cols_range(0, ks), Trans::Yes, Uk.view());
    const Matrix<High> Uk_h = convert_matrix<High>(Uk);
    const Matrix<High> Pk = matmul<High>(Uk_h.view(), Trans::Yes, Uk_h.view());
    ++out.stats.sync_points;
    const Matrix<High> Tkk_h = detail::pythagorean_chol<High>(Pk, convert_matrix<High>(Tcol).view());
    const Matrix<Low> Wk = minus_product<Low>(Uk.view(), W.cols_range(0, ks), Tcol.view());
    put(W.cols_range(ks, s),
        convert_matrix<Low>(tri_solve_right<High>(convert_matrix<High>(Wk).view(), Tkk_h.view())));

    const Matrix<Low> Skk = convert_matrix<Low>(Skk_h);
    put(R.sub(0, ks, ks, s), detail::plus_product<Low>(Scol.view(), Tcol.view(), Skk.view()));
    put(R.sub(ks, ks, s, s), convert_matrix<Low>(detail::triangular_product<High>(Tkk_h.view(), Skk_h.view())));
  }

  detail::finish_stats(out.stats, out.factors, clock);
  return out;
}

/// Uniform-precision dispatch by algorithm id; two-precision ids run with
/// the degenerate pair (T, T).
template <Scalar T>
BgsResult<T> run_bgs(Algorithm a, const BlockMatrix<T>& X, IntraorthId io)
{
  switch (a)
  {
    case Algorithm::BcgsPip:
      return bcgs_pip<T>(X, io);
    case Algorithm::BcgsPipPlus:
      return bcgs_pip_plus<T>(X, io);
    case Algorithm::BcgsPipiPlus:
      return bcgs_pipi_plus<T>(X, io);
    case Algorithm::BcgsPipMp:
      return bcgs_pip_mp<T, T>(X, io);
    case Algorithm::BcgsPipPlusMp:
      return bcgs_pip_plus_mp<T, T>(X, io);
    case Algorithm::BcgsPipiPlusMp:
      return bcgs_pipi_plus_mp<T, T>(X, io);
  }
  throw contract_error("run_bgs: unregistered algorithm");
}

/// Two-precision dispatch; uniform ids ignore High and run in Low.
template <Scalar Low, Scalar High>
BgsResult<Low> run_bgs_mp(Algorithm a, const BlockMatrix<Low>& X, IntraorthId io)
{
  switch (a)
  {
    case Algorithm::BcgsPipMp:
      return bcgs_pip_mp<Low, High>(X, io);
    case Algorithm::BcgsPipPlusMp:
      return bcgs_pip_plus_mp<Low, High>(X, io);
    case Algorithm::BcgsPipiPlusMp:
      return bcgs_pipi_plus_mp<Low, High>(X, io);
    default:
      return run_bgs<Low>(a, X, io);
  }
}

} // namespace bgspip

#endif
