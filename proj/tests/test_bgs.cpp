// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace bgspip;

namespace
{

const double eps = unit_roundoff<double>();
const double eps_single = unit_roundoff<float>();

// t2 for which glued(100, 10, 2, t1 = 1, t2) has kappa close to 10^j.
double glued_t2(double j) { return j - 0.806; }

BlockMatrix<double> glued(double log_kappa, std::uint64_t seed = 42)
{
  return gen_glued(100, 10, 2, 1.0, glued_t2(log_kappa), seed);
}

BlockMatrix<double> leading_blocks(const BlockMatrix<double>& X, index_t k)
{
  return BlockMatrix<double>(Matrix<double>(X.matrix().cols_range(0, k * X.block_size())), k, X.block_size());
}

double loo(const BgsResult<double>& r) { return loss_of_orthogonality<double>(r.factors.Q); }

const Algorithm uniform_algorithms[] = {Algorithm::BcgsPip, Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus};

} // namespace

TEST(AlgorithmNames, ParseRoundTripAndCounterparts)
{
  for (Algorithm a : all_algorithms)
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_EQ(to_string(Algorithm::BcgsPipiPlusMp), "BCGS_PIPI+_MP");
  EXPECT_FALSE(parse_algorithm("BCGS").has_value());
  EXPECT_EQ(uniform_counterpart(Algorithm::BcgsPipPlusMp), Algorithm::BcgsPipPlus);
  EXPECT_TRUE(is_mixed_precision(Algorithm::BcgsPipMp));
  EXPECT_FALSE(is_mixed_precision(Algorithm::BcgsPipiPlus));
}

TEST(SyncPoints, ClosedFormForEveryAlgorithmAndIO)
{
  for (index_t p : {1, 2, 5, 10})
  {
    const BlockMatrix<double> X = gen_default(60, p, 3, 2.0, 1);
    for (Algorithm a : all_algorithms)
      for (IntraorthId io : all_intraorth)
      {
        const auto r = run_bgs_mp<float, double>(a, X.converted<float>(), io);
        EXPECT_EQ(sync_count(r.stats), expected_sync_points(a, p)) << to_string(a) << " p=" << p;
      }
  }
  EXPECT_EQ(expected_sync_points(Algorithm::BcgsPip, 10), 10u);
  EXPECT_EQ(expected_sync_points(Algorithm::BcgsPipPlus, 10), 20u);
  EXPECT_EQ(expected_sync_points(Algorithm::BcgsPipiPlus, 10), 19u);
  EXPECT_EQ(expected_sync_points(Algorithm::BcgsPipiPlusMp, 1), 1u);
}

TEST(SingleBlock, PipIsTheIntraorthogonalization)
{
  const BlockMatrix<double> X = gen_default(40, 1, 6, 3.0, 2);
  for (IntraorthId io : all_intraorth)
  {
    const auto r = bcgs_pip<double>(X, io);
    const auto f = intraorthogonalize<double>(X.matrix().view(), io);
    EXPECT_TRUE(bitwise_equal(r.factors.Q, f.Q));
    EXPECT_TRUE(bitwise_equal(r.factors.R, f.R));
  }
}

TEST(SingleBlock, PipPlusAppliesTheIOTwice)
{
  const BlockMatrix<double> X = gen_default(40, 1, 6, 6.0, 3);
  const auto r = bcgs_pip_plus<double>(X, IntraorthId::CholQR);
  EXPECT_EQ(r.stats.sync_points, 2u);
  const auto once = chol_qr<double>(X.matrix().view());
  const auto twice = chol_qr<double>(once.Q.view());
  EXPECT_TRUE(bitwise_equal(r.factors.Q, twice.Q));
  EXPECT_LE(loo(r), 1e-14);
}

TEST(SingleBlock, PipiPlusUsesOneSync)
{
  const BlockMatrix<double> X = gen_default(40, 1, 6, 3.0, 4);
  const auto r = bcgs_pipi_plus<double>(X, IntraorthId::HouseQR);
  EXPECT_EQ(r.stats.sync_points, 1u);
  EXPECT_LE(loo(r), 1e-14);
}

TEST(Orthonormal, EveryAlgorithmReturnsIdentityR)
{
  const Matrix<double> Q0 = householder_qr<double>(testutil::gaussian(50, 12, 5)).Q;
  const BlockMatrix<double> X(Q0, 4, 3);
  for (Algorithm a : all_algorithms)
    for (IntraorthId io : all_intraorth)
    {
      auto r = run_bgs_mp<double, DoubleDouble>(a, X, io);
      testutil::normalize_signs(r.factors.Q, r.factors.R);
      EXPECT_LE(testutil::max_abs_diff(r.factors.R, Matrix<double>::identity(12)), 100 * eps) << to_string(a);
      EXPECT_LE(loo(r), 100 * eps) << to_string(a);
    }
}

TEST(BcgsPip, GluedKappa1e4WithinQuadraticBound)
{
  const BlockMatrix<double> X = glued(4);
  const double kappa = cond2<double>(X.matrix());
  const auto r = bcgs_pip<double>(X, IntraorthId::HouseQR);
  EXPECT_LE(loo(r), 100 * eps * kappa * kappa);
  EXPECT_LE(rel_chol_residual<double>(r.factors.R, X.matrix()), 1e-12);
}

TEST(BcgsPip, QuadraticBoundAcrossSweep)
{
  // Valid while eps * kappa^2 <= 1/2, i.e. kappa up to about 6.7e7.
  for (double j = 1; j <= 7.5; j += 0.5)
  {
    const BlockMatrix<double> X = glued(j, 9);
    const double kappa = cond2<double>(X.matrix());
    if (eps * kappa * kappa > 0.5)
      continue;
    EXPECT_LE(loo(bcgs_pip<double>(X, IntraorthId::HouseQR)), 100 * eps * kappa * kappa) << kappa;
  }
}

TEST(BcgsPipPlus, CholQRSufficesUpToKappa1e6)
{
  EXPECT_LE(loo(bcgs_pip_plus<double>(glued(6), IntraorthId::CholQR)), 1e-13);
}

TEST(BcgsPipPlus, LosesOrthogonalityBeyondInverseSqrtEps)
{
  const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, 9.3, 42);
  ASSERT_GE(cond2<double>(X.matrix()), 1e10);
  const auto r = bcgs_pip_plus<double>(X, IntraorthId::HouseQR);
  const double l = loo(r);
  EXPECT_TRUE(r.stats.had_nan || std::isnan(l) || l > 1e-13);
}

TEST(Reorthogonalized, WorkingPrecisionLooUpToKappa1e7)
{
  for (int j = 1; j <= 7; ++j)
  {
    const BlockMatrix<double> X = glued(j, 17);
    for (Algorithm a : {Algorithm::BcgsPipPlus, Algorithm::BcgsPipiPlus})
      EXPECT_LE(loo(run_bgs<double>(a, X, IntraorthId::HouseQR)), 1e-13) << to_string(a) << " j=" << j;
  }
}

TEST(BcgsPipiPlus, StableIONeededOnMonomial)
{
  const BlockMatrix<double> X = gen_monomial(400, 24, 10, 48, 5, 42);
  ASSERT_LE(cond2<double>(X.matrix()), 1e7);
  const double house = loo(bcgs_pipi_plus<double>(X, IntraorthId::HouseQR));
  const double chol = loo(bcgs_pipi_plus<double>(X, IntraorthId::CholQR));
  EXPECT_LE(house, 1e-13);
  EXPECT_GE(chol, 10 * house);
}

TEST(Breakdown, RunCompletesAndFlagsNaN)
{
  const BlockMatrix<double> X = gen_glued(100, 10, 2, 1.0, 11.2, 42);
  for (Algorithm a : uniform_algorithms)
  {
    const auto r = run_bgs<double>(a, X, IntraorthId::CholQR);
    EXPECT_EQ(r.factors.Q.rows(), 100);
    EXPECT_EQ(r.stats.had_nan, r.factors.Q.has_nan() || r.factors.R.has_nan());
    EXPECT_EQ(r.stats.sync_points, expected_sync_points(a, 10));
  }
}

TEST(DegeneratePair, BitIdenticalToUniform)
{
  for (std::uint64_t seed = 0; seed < 8; ++seed)
  {
    const BlockMatrix<double> X = gen_glued(60, 6, 3, 1.0, 1.0 + static_cast<double>(seed), seed);
    const BlockMatrix<float> Xs = X.converted<float>();
    for (IntraorthId io : all_intraorth)
    {
      for (Algorithm a : {Algorithm::BcgsPipMp, Algorithm::BcgsPipPlusMp, Algorithm::BcgsPipiPlusMp})
      {
        const auto mp = run_bgs_mp<double, double>(a, X, io);
        const auto uni = run_bgs<double>(uniform_counterpart(a), X, io);
        EXPECT_TRUE(bitwise_equal(mp.factors.Q, uni.factors.Q) && bitwise_equal(mp.factors.R, uni.factors.R))
            << to_string(a);
        const auto mps = run_bgs_mp<float, float>(a, Xs, io);
        const auto unis = run_bgs<float>(uniform_counterpart(a), Xs, io);
        EXPECT_TRUE(bitwise_equal(mps.factors.Q, unis.factors.Q) && bitwise_equal(mps.factors.R, unis.factors.R))
            << to_string(a) << " (single)";
      }
    }
  }
}

TEST(ColumnCountInduction, LeadingFactorsDependOnlyOnLeadingBlocks)
{
  const BlockMatrix<double> X = glued(5, 3);
  for (Algorithm a : all_algorithms)
    for (IntraorthId io : all_intraorth)
    {
      const auto full = run_bgs_mp<double, DoubleDouble>(a, X, io);
      for (index_t k : {1, 3, 7})
      {
        const auto part = run_bgs_mp<double, DoubleDouble>(a, leading_blocks(X, k), io);
        const index_t n = k * X.block_size();
        EXPECT_TRUE(bitwise_equal(part.factors.Q, Matrix<double>(full.factors.Q.cols_range(0, n))))
            << to_string(a) << " k=" << k;
        EXPECT_TRUE(bitwise_equal(part.factors.R, Matrix<double>(full.factors.R.sub(0, 0, n, n))))
            << to_string(a) << " k=" << k;
      }
    }
}

TEST(Factors, RIsUpperTriangularWithConsistentShapes)
{
  const BlockMatrix<double> X = gen_piled(60, 5, 4, 0.0, 3.0, 8);
  for (Algorithm a : all_algorithms)
  {
    const auto r = run_bgs_mp<double, DoubleDouble>(a, X, IntraorthId::HouseQR);
    EXPECT_EQ(r.factors.Q.rows(), 60);
    EXPECT_EQ(r.factors.Q.cols(), 20);
    EXPECT_EQ(r.factors.R.rows(), 20);
    EXPECT_TRUE(is_upper_triangular(r.factors.R)) << to_string(a);
  }
}

// Residual and Cholesky-residual contracts over random instances of every
// class. CholQR gives PIPI+ no Cholesky-residual guarantee, so that
// combination is only checked for the standard residual.
TEST(Contracts, ResidualAndCholeskyResidualOnRandomInstances)
{
  CounterRng rng(2024, 0);
  for (int trial = 0; trial < 24; ++trial)
  {
    const MatrixClass cls = all_matrix_classes[static_cast<std::size_t>(trial) % 4];
    MatrixSpec spec{cls, 80, 6, 3, {}, static_cast<std::uint64_t>(trial)};
    const double t = 1.0 + rng.uniform() * 5.0;
    switch (cls)
    {
      case MatrixClass::Default: spec.knobs = {t}; break;
      case MatrixClass::Glued: spec.knobs = {1.0, t - 0.8}; break;
      case MatrixClass::Piled: spec.knobs = {0.0, t - 1.0}; break;
      case MatrixClass::Monomial: spec.knobs = {6.0, 3.0}; break;
    }
    const BlockMatrix<double> X = generate(spec);
    for (Algorithm a : all_algorithms)
      for (IntraorthId io : all_intraorth)
      {
        const auto r = run_bgs_mp<double, DoubleDouble>(a, X, io);
        if (r.stats.had_nan)
          continue;
        EXPECT_LE(rel_residual<double>(r.factors.Q, r.factors.R, X.matrix()), 1e-13)
            << to_string(cls) << ' ' << to_string(a) << ' ' << to_string(io);
        const bool pipi_chol = io == IntraorthId::CholQR &&
                               (a == Algorithm::BcgsPipiPlus || a == Algorithm::BcgsPipiPlusMp);
        if (!pipi_chol)
          EXPECT_LE(rel_chol_residual<double>(r.factors.R, X.matrix()), 1e-12)
              << to_string(cls) << ' ' << to_string(a) << ' ' << to_string(io);
      }
  }
}

TEST(BlockSize, PipiPlusLooIndependentOfPartition)
{
  for (std::uint64_t seed : {7u, 8u, 9u})
  {
    const BlockMatrix<double> base = glued(5, seed);
    double lo = HUGE_VAL, hi = 0.0;
    for (index_t s : {1, 2, 5})
    {
      const double l = loo(bcgs_pipi_plus<double>(base.repartition(s), IntraorthId::HouseQR));
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    EXPECT_LE(hi / lo, 10.0) << "seed " << seed;
  }
}

TEST(Determinism, RepeatedRunsAreBitIdentical)
{
  const BlockMatrix<double> X = glued(6);
  for (Algorithm a : all_algorithms)
  {
    const auto r1 = run_bgs_mp<float, double>(a, X.converted<float>(), IntraorthId::HouseQR);
    const auto r2 = run_bgs_mp<float, double>(a, X.converted<float>(), IntraorthId::HouseQR);
    EXPECT_TRUE(bitwise_equal(r1.factors.Q, r2.factors.Q) && bitwise_equal(r1.factors.R, r2.factors.R));
  }
}

TEST(MixedPrecision, PipMpCholeskyResidualAtLowPrecision)
{
  const BlockMatrix<double> X = glued(5);
  const BlockMatrix<float> Xs = X.converted<float>();
  const auto r = bcgs_pip_mp<float, double>(Xs, IntraorthId::HouseQR);
  EXPECT_LE(rel_chol_residual<float>(r.factors.R, Xs.matrix()), 1e-6);
}

TEST(MixedPrecision, PipMpBeyondInverseSqrtEpsCompletes)
{
  const BlockMatrix<float> Xs = glued(6).converted<float>();
  const auto r = bcgs_pip_mp<float, double>(Xs, IntraorthId::HouseQR);
  EXPECT_EQ(r.stats.sync_points, 10u);
  EXPECT_EQ(r.factors.Q.cols(), 20);
}

TEST(MixedPrecision, PipPlusMpLooAtLowPrecision)
{
  const BlockMatrix<float> Xs = glued(5).converted<float>();
  const auto r = bcgs_pip_plus_mp<float, double>(Xs, IntraorthId::HouseQR);
  EXPECT_LE(loss_of_orthogonality<float>(r.factors.Q), 100 * eps_single);
}

TEST(MixedPrecision, PipiPlusMpLinearInKappaOnGlued)
{
  const BlockMatrix<double> X = glued(5);
  const double kappa = cond2<double>(X.matrix());
  const auto r = bcgs_pipi_plus_mp<float, double>(X.converted<float>(), IntraorthId::HouseQR);
  EXPECT_LE(loss_of_orthogonality<float>(r.factors.Q), 100 * eps_single * kappa);
}

TEST(MixedPrecision, PipiPlusMpLinearInKappaOnDefaultBelowSingleBreakdown)
{
  // With S computed in single, the Pythagorean Cholesky holds while eps_single * kappa^2 < 1.
  for (double t = 1; t <= 4; t += 1)
  {
    const BlockMatrix<double> X = gen_default(100, 10, 2, t, 5);
    const double kappa = cond2<double>(X.matrix());
    const auto r = bcgs_pipi_plus_mp<float, double>(X.converted<float>(), IntraorthId::HouseQR);
    EXPECT_LE(loss_of_orthogonality<float>(r.factors.Q), 100 * eps_single * kappa) << "t=" << t;
  }
}

TEST(MixedPrecision, PipiPlusMpLinearInKappaOnDefaultDoubleDoublePair)
{
  for (double t = 1; t <= 7; t += 1)
  {
    const BlockMatrix<double> X = gen_default(100, 10, 2, t, 5);
    const double kappa = cond2<double>(X.matrix());
    const auto r = bcgs_pipi_plus_mp<double, DoubleDouble>(X, IntraorthId::HouseQR);
    EXPECT_LE(loss_of_orthogonality<double>(r.factors.Q), 100 * eps * kappa) << "t=" << t;
  }
}

// Breaks down (NaN) for kappa >= 1e5 with a (single, double) pair; kept disabled as a record.
TEST(MixedPrecision, DISABLED_PipiPlusMpLinearInKappaOnDefaultSingleDoubleTo1e7)
{
  for (double t = 1; t <= 7; t += 1)
  {
    const BlockMatrix<double> X = gen_default(100, 10, 2, t, 5);
    const double kappa = cond2<double>(X.matrix());
    const auto r = bcgs_pipi_plus_mp<float, double>(X.converted<float>(), IntraorthId::HouseQR);
    EXPECT_LE(loss_of_orthogonality<float>(r.factors.Q), 100 * eps_single * kappa) << "t=" << t;
  }
}

TEST(MixedPrecision, DoubleDoubleHighPrecisionRuns)
{
  const BlockMatrix<double> X = glued(7);
  const auto r = bcgs_pipi_plus_mp<double, DoubleDouble>(X, IntraorthId::HouseQR);
  EXPECT_FALSE(r.stats.had_nan);
  EXPECT_LE(loo(r), 1e-13);
}
