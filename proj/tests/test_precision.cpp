// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "bgspip/precision.hpp"
#include "bgspip/rng.hpp"

using namespace bgspip;

namespace
{

// 200-bit binary float: far more than the 106 bits a double-double carries.
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

Big big(const DoubleDouble& x) { return Big(x.hi) + Big(x.lo); }

DoubleDouble random_dd(CounterRng& rng, int max_exp)
{
  const double e = std::ldexp(1.0, static_cast<int>(rng.uniform() * 2 * max_exp) - max_exp);
  const double hi = rng.normal() * e;
  const double lo = hi * (2.0 * rng.uniform() - 1.0) * 0x1p-53;
  return DoubleDouble::from_sum(hi, lo);
}

double rel_err(const DoubleDouble& got, const Big& exact)
{
  if (exact == 0)
    return got.hi == 0.0 ? 0.0 : HUGE_VAL;
  return static_cast<double>(abs(Big(big(got) - exact) / exact));
}

constexpr int samples = 100000;
const double u_dd = unit_roundoff(PrecisionId::DoubleDouble);

} // namespace

TEST(ErrorFreeTransforms, TwoSumIsExact)
{
  CounterRng rng(1, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const double a = rng.normal() * std::ldexp(1.0, static_cast<int>(rng.uniform() * 80) - 40);
    const double b = rng.normal() * std::ldexp(1.0, static_cast<int>(rng.uniform() * 80) - 40);
    double s, e;
    dd_detail::two_sum(a, b, s, e);
    EXPECT_EQ(Big(s) + Big(e), Big(a) + Big(b));
    EXPECT_EQ(s, a + b);
  }
}

TEST(ErrorFreeTransforms, TwoProdIsExact)
{
  CounterRng rng(2, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const double a = rng.normal() * 1e10, b = rng.normal() * 1e-7;
    double p, e;
    dd_detail::two_prod(a, b, p, e);
    EXPECT_EQ(Big(p) + Big(e), Big(a) * Big(b));
  }
}

TEST(DoubleDouble, OnePlusTinyKeepsTheTail)
{
  const DoubleDouble x = DoubleDouble(1.0) + DoubleDouble(0x1p-80);
  EXPECT_EQ(x.hi, 1.0);
  EXPECT_EQ(x.lo, 0x1p-80);
  EXPECT_EQ(static_cast<double>(x - DoubleDouble(1.0)), 0x1p-80);
}

// Relative error of each operation against a 200-bit oracle on 1e5 random
// operand pairs must stay within the reported unit roundoff 2^-104. The
// worst-case analytic bounds are a few units larger; on random data the
// observed maxima sit between 0.4u and 0.8u.
TEST(DoubleDouble, AdditionErrorBound)
{
  CounterRng rng(10, 0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
  {
    const DoubleDouble a = random_dd(rng, 30), b = random_dd(rng, 30);
    worst = std::max(worst, rel_err(a + b, big(a) + big(b)));
  }
  EXPECT_LE(worst, u_dd) << "worst relative error " << worst;
}

TEST(DoubleDouble, SubtractionErrorBound)
{
  CounterRng rng(11, 0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
  {
    const DoubleDouble a = random_dd(rng, 30), b = random_dd(rng, 30);
    worst = std::max(worst, rel_err(a - b, big(a) - big(b)));
  }
  EXPECT_LE(worst, u_dd) << "worst relative error " << worst;
}

TEST(DoubleDouble, MultiplicationErrorBound)
{
  CounterRng rng(12, 0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
  {
    const DoubleDouble a = random_dd(rng, 30), b = random_dd(rng, 30);
    worst = std::max(worst, rel_err(a * b, big(a) * big(b)));
  }
  EXPECT_LE(worst, u_dd) << "worst relative error " << worst;
}

TEST(DoubleDouble, DivisionErrorBound)
{
  CounterRng rng(13, 0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
  {
    const DoubleDouble a = random_dd(rng, 30), b = random_dd(rng, 30);
    worst = std::max(worst, rel_err(a / b, big(a) / big(b)));
  }
  EXPECT_LE(worst, u_dd) << "worst relative error " << worst;
}

TEST(DoubleDouble, SqrtErrorBound)
{
  CounterRng rng(14, 0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
  {
    const DoubleDouble a = abs(random_dd(rng, 60));
    worst = std::max(worst, rel_err(sqrt(a), boost::multiprecision::sqrt(big(a))));
  }
  EXPECT_LE(worst, u_dd) << "worst relative error " << worst;
}

TEST(DoubleDouble, SqrtOfNegativeIsNaN)
{
  EXPECT_TRUE(isnan(sqrt(DoubleDouble(-1.0))));
  EXPECT_EQ(sqrt(DoubleDouble(0.0)).hi, 0.0);
}

TEST(DoubleDouble, NonFiniteValuesPropagate)
{
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(isnan(DoubleDouble(std::nan("")) + DoubleDouble(1.0)));
  EXPECT_FALSE(isfinite(DoubleDouble(inf) * DoubleDouble(2.0)));
  EXPECT_TRUE(isnan(DoubleDouble(0.0) / DoubleDouble(0.0)));
}

TEST(DoubleDouble, OrderingIsLexicographicOnNormalizedPairs)
{
  const DoubleDouble one(1.0);
  const DoubleDouble above = one + DoubleDouble(0x1p-90);
  EXPECT_LT(one, above);
  EXPECT_GT(above, one);
  EXPECT_LE(one, one);
  EXPECT_FALSE(DoubleDouble(std::nan("")) <= one);
}

TEST(UnitRoundoff, ValuesAndOrdering)
{
  EXPECT_EQ(unit_roundoff(PrecisionId::Single), 0x1p-24);
  EXPECT_EQ(unit_roundoff(PrecisionId::Double), 0x1p-53);
  EXPECT_EQ(unit_roundoff(PrecisionId::DoubleDouble), 0x1p-104);
  EXPECT_EQ(unit_roundoff<float>(), static_cast<double>(std::numeric_limits<float>::epsilon()) / 2);
  EXPECT_EQ(unit_roundoff<double>(), std::numeric_limits<double>::epsilon() / 2);
}

TEST(PrecisionNames, ParseRoundTrip)
{
  for (PrecisionId p : {PrecisionId::Single, PrecisionId::Double, PrecisionId::DoubleDouble})
    EXPECT_EQ(parse_precision(to_string(p)), p);
  EXPECT_FALSE(parse_precision("quad").has_value());
}

TEST(PrecisionPair, RejectsHighCoarserThanLow)
{
  EXPECT_THROW(PrecisionPair(PrecisionId::Double, PrecisionId::Single), std::invalid_argument);
  EXPECT_NO_THROW(PrecisionPair(PrecisionId::Single, PrecisionId::Double));
  EXPECT_NO_THROW(PrecisionPair(PrecisionId::Double, PrecisionId::Double));
  EXPECT_EQ(PrecisionPair(PrecisionId::Single, PrecisionId::Double).label(), "single/double");
}

TEST(Demote, DoubleToFloatRoundsToNearestEven)
{
  // 1 + 2^-24 is the exact midpoint between 1 and 1 + 2^-23: ties to even.
  EXPECT_EQ(demote<float>(1.0 + 0x1p-24), 1.0f);
  EXPECT_EQ(demote<float>(1.0 + 3 * 0x1p-24), 1.0f + 0x1p-22f);
  EXPECT_EQ(demote<float>(1.0 + 0x1p-24 + 0x1p-40), 1.0f + 0x1p-23f);
}

TEST(Demote, DoubleDoubleToFloatSeesTheLowWord)
{
  // hi alone is an exact float midpoint; the sign of lo decides.
  const DoubleDouble up = DoubleDouble::from_sum(1.0 + 0x1p-24, 0x1p-80);
  const DoubleDouble down = DoubleDouble::from_sum(1.0 + 0x1p-24, -0x1p-80);
  const DoubleDouble tie = DoubleDouble::from_sum(1.0 + 0x1p-24, 0.0);
  EXPECT_EQ(demote<float>(up), 1.0f + 0x1p-23f);
  EXPECT_EQ(demote<float>(down), 1.0f);
  EXPECT_EQ(demote<float>(tie), 1.0f);
}

TEST(Demote, DoubleDoubleToDoubleIsCorrectlyRounded)
{
  CounterRng rng(20, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const DoubleDouble x = random_dd(rng, 20);
    const double d = demote<double>(x);
    const Big err = abs(Big(d) - big(x));
    EXPECT_LE(err, abs(Big(std::nextafter(d, HUGE_VAL)) - big(x)));
    EXPECT_LE(err, abs(Big(std::nextafter(d, -HUGE_VAL)) - big(x)));
  }
}

TEST(Demote, IsMonotone)
{
  CounterRng rng(21, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const double a = rng.normal(), b = rng.normal();
    if (a <= b)
      EXPECT_LE(demote<float>(a), demote<float>(b));
    else
      EXPECT_GE(demote<float>(a), demote<float>(b));
  }
}

TEST(Promote, RoundTripIsIdentity)
{
  CounterRng rng(22, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const float f = static_cast<float>(rng.normal());
    EXPECT_EQ(demote<float>(promote<double>(f)), f);
    EXPECT_EQ(demote<float>(promote<DoubleDouble>(f)), f);
    const double d = rng.normal();
    EXPECT_EQ(demote<double>(promote<DoubleDouble>(d)), d);
  }
}

TEST(Demote, PreservesSpecialValues)
{
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(std::isnan(demote<float>(std::nan(""))));
  EXPECT_EQ(demote<float>(inf), std::numeric_limits<float>::infinity());
  EXPECT_EQ(demote<float>(1e300), std::numeric_limits<float>::infinity());
  EXPECT_TRUE(std::signbit(demote<float>(-0.0)));
}

TEST(DoubleDouble, ExactSumFitsThePair)
{
  const DoubleDouble x = DoubleDouble(1.0) + DoubleDouble(0x1p-60);
  EXPECT_EQ(x.hi, 1.0);
  EXPECT_EQ(x.lo, 0x1p-60);
}

TEST(DoubleDouble, ThreeTimesOneThird)
{
  const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
  const DoubleDouble one = DoubleDouble(3.0) * third;
  EXPECT_LE(static_cast<double>(abs(Big(big(one) - 1))), u_dd);
}

namespace
{

// Independent double -> float rounding: take the 53-bit significand apart
// and round to 24 bits by hand (ties to even). Normal float range only.
float bitwise_round_to_float(double x)
{
  int e;
  const double f = std::frexp(std::fabs(x), &e); // x = f * 2^e, f in [0.5, 1)
  std::uint64_t mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  const std::uint64_t drop = mant & ((1ull << 29) - 1);
  mant >>= 29;
  const std::uint64_t half = 1ull << 28;
  if (drop > half || (drop == half && (mant & 1)))
    ++mant;
  const float r = std::ldexp(static_cast<float>(mant), e - 24);
  return std::signbit(x) ? -r : r;
}

} // namespace

TEST(Demote, MatchesBitLevelRoundingOracle)
{
  CounterRng rng(23, 0);
  for (int i = 0; i < 10000; ++i)
  {
    const double x = rng.normal() * std::ldexp(1.0, static_cast<int>(rng.uniform() * 100) - 50);
    EXPECT_EQ(demote<float>(x), bitwise_round_to_float(x)) << x;
  }
  EXPECT_EQ(demote<float>(1.0), 1.0f);
  EXPECT_EQ(demote<float>(1.0 + 0x1p-30), 1.0f);
}
