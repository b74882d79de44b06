// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_TESTMAT_HPP
#define BGSPIP_TESTMAT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace bgspip
{

//
// Deterministic generators for the four benchmark matrix classes. Every
// generator is a pure function of its arguments.
//

enum class MatrixClass
{
  Default,
  Glued,
  Monomial,
  Piled
};

inline constexpr std::array<MatrixClass, 4> all_matrix_classes = {MatrixClass::Default, MatrixClass::Glued,
                                                                  MatrixClass::Monomial, MatrixClass::Piled};

inline std::string_view to_string(MatrixClass c)
{
  switch (c)
  {
    case MatrixClass::Default:
      return "default";
    case MatrixClass::Glued:
      return "glued";
    case MatrixClass::Monomial:
      return "monomial";
    case MatrixClass::Piled:
      return "piled";
  }
  return "?";
}

inline std::optional<MatrixClass> parse_matrix_class(std::string_view name)
{
  for (MatrixClass c : all_matrix_classes)
    if (to_string(c) == name)
      return c;
  return std::nullopt;
}

/// Number of conditioning knobs per class: default t; glued (t1, t2);
/// monomial (r, t); piled (t1, t2).
inline std::size_t knob_count(MatrixClass c) { return c == MatrixClass::Default ? 1 : 2; }

struct MatrixSpec
{
  MatrixClass cls = MatrixClass::Default;
  index_t m = 0;
  index_t p = 0;
  index_t s = 0;
  std::vector<double> knobs;
  std::uint64_t seed = 0;
};

namespace detail
{

/// n values 10^(-t i/(n-1)), i = 0..n-1: log-equispaced from 1 down to 10^-t.
inline std::vector<double> log_spaced(index_t n, double t)
{
  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  for (index_t i = 1; i < n; ++i)
    v[static_cast<std::size_t>(i)] = std::pow(10.0, -t * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

inline Matrix<double> gaussian(index_t m, index_t n, CounterRng rng)
{
  Matrix<double> G(m, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < m; ++i)
      G(i, j) = rng.normal();
  return G;
}

inline Matrix<double> random_orthonormal(index_t m, index_t n, CounterRng rng)
{
  return householder_qr<double>(gaussian(m, n, rng).view()).Q;
}

/// U diag(sigma) V^T with U m x n and V n x n seeded orthonormal factors.
inline Matrix<double> svd_product(index_t m, index_t n, const std::vector<double>& sigma, const CounterRng& rng)
{
  Matrix<double> U = random_orthonormal(m, n, rng.split(1));
  const Matrix<double> V = random_orthonormal(n, n, rng.split(2));
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < m; ++i)
      U(i, j) *= sigma[static_cast<std::size_t>(j)];
  Matrix<double> Vt(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i)
      Vt(j, i) = V(i, j);
  return matmul<double>(U.view(), Trans::No, Vt.view());
}

inline void check_dims(index_t m, index_t p, index_t s)
{
  require(m >= 1 && p >= 1 && s >= 1, "matrix generator: dimensions must be positive");
  require(p * s <= m, "matrix generator: p*s must not exceed m");
}

} // namespace detail

/// X = U Sigma_t V^T with singular values log-equispaced on [10^-t, 1].
inline BlockMatrix<double> gen_default(index_t m, index_t p, index_t s, double t, std::uint64_t seed)
{
  detail::check_dims(m, p, s);
  require(t >= 0.0, "gen_default: t must be nonnegative");
  const index_t n = p * s;
  CounterRng rng(seed, 0);
  return BlockMatrix<double>(detail::svd_product(m, n, detail::log_spaced(n, t), rng), p, s);
}

/// A default matrix whose every block vector is right-multiplied by
/// Sigma_r V_k, with Sigma_r log-equispaced on [10^-t2, 1] and V_k a fresh
/// orthonormal s x s factor per block.
inline BlockMatrix<double> gen_glued(index_t m, index_t p, index_t s, double t1, double t2, std::uint64_t seed)
{
  require(t2 >= 0.0, "gen_glued: t2 must be nonnegative");
  BlockMatrix<double> X = gen_default(m, p, s, t1, seed);
  const std::vector<double> sigma = detail::log_spaced(s, t2);
  const CounterRng rng(seed, 1);
  for (index_t k = 0; k < p; ++k)
  {
    Matrix<double> G = detail::random_orthonormal(s, s, rng.split(static_cast<std::uint64_t>(k)));
    for (index_t j = 0; j < s; ++j)
      for (index_t i = 0; i < s; ++i)
        G(i, j) *= sigma[static_cast<std::size_t>(i)];
    const Matrix<double> Xk(X.block(k));
    X.block(k).assign(matmul<double>(Xk.view(), Trans::No, G.view()).view());
  }
  return X;
}

/// r Krylov block vectors [v, A v, ..., A^(t-1) v] for a diagonal A with m
/// eigenvalues evenly spaced inside (0.1, 10), each v uniform then
/// normalized; the r*t = p*s columns are repartitioned into p blocks of s.
inline BlockMatrix<double> gen_monomial(index_t m, index_t p, index_t s, index_t r, index_t t, std::uint64_t seed)
{
  detail::check_dims(m, p, s);
  require(r >= 1 && t >= 1 && r * t == p * s, "gen_monomial: requires r*t == p*s");
  std::vector<double> eig(static_cast<std::size_t>(m));
  for (index_t i = 0; i < m; ++i)
    eig[static_cast<std::size_t>(i)] = 0.1 + 9.9 * static_cast<double>(i + 1) / static_cast<double>(m + 1);

  const CounterRng rng(seed, 2);
  Matrix<double> X(m, p * s);
  for (index_t k = 0; k < r; ++k)
  {
    CounterRng vr = rng.split(static_cast<std::uint64_t>(k));
    double* v = X.col(k * t);
    double nrm = 0.0;
    for (index_t i = 0; i < m; ++i)
    {
      v[i] = vr.uniform();
      nrm += v[i] * v[i];
    }
    nrm = std::sqrt(nrm);
    for (index_t i = 0; i < m; ++i)
      v[i] /= nrm;
    for (index_t j = 1; j < t; ++j)
    {
      const double* prev = X.col(k * t + j - 1);
      double* cur = X.col(k * t + j);
      for (index_t i = 0; i < m; ++i)
        cur[i] = eig[static_cast<std::size_t>(i)] * prev[i];
    }
  }
  return BlockMatrix<double>(std::move(X), p, s);
}

/// X_1 a default block with knob t1, then X_k = X_{k-1} + Z_k with fresh
/// default blocks Z_k of knob t2.
inline BlockMatrix<double> gen_piled(index_t m, index_t p, index_t s, double t1, double t2, std::uint64_t seed)
{
  detail::check_dims(m, p, s);
  require(t1 >= 0.0 && t2 >= 0.0, "gen_piled: knobs must be nonnegative");
  const CounterRng rng(seed, 3);
  Matrix<double> X(m, p * s);
  for (index_t k = 0; k < p; ++k)
  {
    const CounterRng br = rng.split(static_cast<std::uint64_t>(k));
    const Matrix<double> B = detail::svd_product(m, s, detail::log_spaced(s, k == 0 ? t1 : t2), br);
    for (index_t j = 0; j < s; ++j)
      for (index_t i = 0; i < m; ++i)
        X(i, k * s + j) = k == 0 ? B(i, j) : X(i, (k - 1) * s + j) + B(i, j);
  }
  return BlockMatrix<double>(std::move(X), p, s);
}

/// Checks dimensions and knob arity for a spec; throws contract_error.
inline void validate(const MatrixSpec& spec)
{
  detail::check_dims(spec.m, spec.p, spec.s);
  require(spec.knobs.size() == knob_count(spec.cls), "matrix spec: wrong number of knobs for class");
  for (double k : spec.knobs)
    require(std::isfinite(k) && k >= 0.0, "matrix spec: knobs must be finite and nonnegative");
  if (spec.cls == MatrixClass::Monomial)
  {
    const double r = spec.knobs[0], t = spec.knobs[1];
    require(r == std::floor(r) && t == std::floor(t) && r >= 1 && t >= 1, "monomial: r and t must be positive integers");
    require(static_cast<index_t>(r) * static_cast<index_t>(t) == spec.p * spec.s, "monomial: requires r*t == p*s");
  }
}

inline BlockMatrix<double> generate(const MatrixSpec& spec)
{
  validate(spec);
  switch (spec.cls)
  {
    case MatrixClass::Default:
      return gen_default(spec.m, spec.p, spec.s, spec.knobs[0], spec.seed);
    case MatrixClass::Glued:
      return gen_glued(spec.m, spec.p, spec.s, spec.knobs[0], spec.knobs[1], spec.seed);
    case MatrixClass::Monomial:
      return gen_monomial(spec.m, spec.p, spec.s, static_cast<index_t>(spec.knobs[0]),
                          static_cast<index_t>(spec.knobs[1]), spec.seed);
    case MatrixClass::Piled:
      return gen_piled(spec.m, spec.p, spec.s, spec.knobs[0], spec.knobs[1], spec.seed);
  }
  throw contract_error("generate: unregistered matrix class");
}

} // namespace bgspip

#endif
