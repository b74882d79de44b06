// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_INTRAORTH_HPP
#define BGSPIP_INTRAORTH_HPP

#include <array>
#include <optional>
#include <string_view>

#include "linalg.hpp"

namespace bgspip
{

/// Routines that orthogonalize the columns of a single block vector.
enum class IntraorthId
{
  HouseQR,
  CholQR
};

inline constexpr std::array<IntraorthId, 2> all_intraorth = {IntraorthId::HouseQR, IntraorthId::CholQR};

inline std::string_view to_string(IntraorthId io)
{
  switch (io)
  {
    case IntraorthId::HouseQR:
      return "HouseQR";
    case IntraorthId::CholQR:
      return "CholQR";
  }
  return "?";
}

inline std::optional<IntraorthId> parse_intraorth(std::string_view name)
{
  for (IntraorthId io : all_intraorth)
    if (to_string(io) == name)
      return io;
  return std::nullopt;
}

/// Cholesky QR: Gram matrix, non-halting Cholesky, right triangular solve,
/// all in T. Loses orthogonality like eps*kappa^2 and produces NaN once the
/// Gram matrix stops being numerically positive definite.
template <Scalar T>
QRFactors<T> chol_qr(ConstMatrixView<T> X)
{
  const Matrix<T> G = matmul<T>(X, Trans::Yes, X);
  Matrix<T> R = cholesky_nonstop<T>(G.view());
  Matrix<T> Q = tri_solve_right<T>(X, R.view());
  return {std::move(Q), std::move(R)};
}

template <Scalar T>
QRFactors<T> intraorthogonalize(ConstMatrixView<T> X, IntraorthId kind)
{
  require(X.rows() >= X.cols(), "intraorthogonalize: block vector must be tall (m >= s)");
  switch (kind)
  {
    case IntraorthId::HouseQR:
      return householder_qr<T>(X);
    case IntraorthId::CholQR:
      return chol_qr<T>(X);
  }
  throw contract_error("intraorthogonalize: unregistered routine");
}

template <Scalar T>
QRFactors<T> intraorthogonalize(const Matrix<T>& X, IntraorthId kind)
{
  return intraorthogonalize<T>(X.view(), kind);
}

} // namespace bgspip

#endif
