// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_PRECISION_HPP
#define BGSPIP_PRECISION_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace bgspip
{

//
// Double-double scalar: an unevaluated sum hi + lo of two doubles with
// |lo| <= ulp(hi)/2. Every operation renormalizes. Relative error per
// operation stays below 2^-104 for finite, non-underflowing operands.
//

namespace dd_detail
{

// Error-free transformations; these rely on strict IEEE double evaluation
// (no contraction, no excess precision).
inline void two_sum(double a, double b, double& s, double& e)
{
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void quick_two_sum(double a, double b, double& s, double& e)
{
  s = a + b;
  e = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& e)
{
  p = a * b;
  e = std::fma(a, b, -p);
}

} // namespace dd_detail

struct DoubleDouble
{
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi(x), lo(0.0) {}
  // Integers appear as literals in generic kernels (T(0), T(1), T(2)).
  constexpr DoubleDouble(int x) : hi(static_cast<double>(x)), lo(0.0) {}

  // Builds a normalized pair from two arbitrary doubles.
  static DoubleDouble from_sum(double a, double b)
  {
    DoubleDouble r;
    dd_detail::two_sum(a, b, r.hi, r.lo);
    if (!std::isfinite(r.hi))
      r.lo = 0.0;
    return r;
  }

  explicit operator double() const { return hi + lo; }

  DoubleDouble operator-() const { return raw(-hi, -lo); }

  DoubleDouble& operator+=(const DoubleDouble& b) { return *this = *this + b; }
  DoubleDouble& operator-=(const DoubleDouble& b) { return *this = *this - b; }
  DoubleDouble& operator*=(const DoubleDouble& b) { return *this = *this * b; }
  DoubleDouble& operator/=(const DoubleDouble& b) { return *this = *this / b; }

  friend DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b)
  {
    double s1, s2, t1, t2;
    dd_detail::two_sum(a.hi, b.hi, s1, s2);
    dd_detail::two_sum(a.lo, b.lo, t1, t2);
    s2 += t1;
    dd_detail::quick_two_sum(s1, s2, s1, s2);
    s2 += t2;
    return renorm(s1, s2);
  }

  friend DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }

  friend DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b)
  {
    double p, e;
    dd_detail::two_prod(a.hi, b.hi, p, e);
    e = std::fma(a.hi, b.lo, e);
    e = std::fma(a.lo, b.hi, e);
    e += a.lo * b.lo;
    return renorm(p, e);
  }

  friend DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b)
  {
    // Three correction steps of long division; the third quotient digit
    // absorbs the rounding of the second.
    const double q1 = a.hi / b.hi;
    if (!std::isfinite(q1))
      return DoubleDouble(q1);
    DoubleDouble r = a - mul_double(b, q1);
    const double q2 = r.hi / b.hi;
    r -= mul_double(b, q2);
    const double q3 = r.hi / b.hi;
    DoubleDouble q = renorm(q1, q2);
    return q + DoubleDouble(q3);
  }

  friend DoubleDouble sqrt(const DoubleDouble& a)
  {
    if (std::isnan(a.hi) || a.hi < 0.0)
      return DoubleDouble(std::numeric_limits<double>::quiet_NaN());
    if (a.hi == 0.0 || !std::isfinite(a.hi))
      return DoubleDouble(a.hi);
    const double s = std::sqrt(a.hi);
    // a - s^2, exact in the leading part thanks to fma.
    const double r = std::fma(-s, s, a.hi) + a.lo;
    return renorm(s, r / (2.0 * s));
  }

  friend DoubleDouble abs(const DoubleDouble& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
  friend bool isnan(const DoubleDouble& a) { return std::isnan(a.hi) || std::isnan(a.lo); }
  friend bool isfinite(const DoubleDouble& a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

  friend bool operator==(const DoubleDouble& a, const DoubleDouble& b) { return a.hi == b.hi && a.lo == b.lo; }
  friend bool operator<(const DoubleDouble& a, const DoubleDouble& b)
  {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
  }
  friend bool operator>(const DoubleDouble& a, const DoubleDouble& b) { return b < a; }
  friend bool operator<=(const DoubleDouble& a, const DoubleDouble& b) { return !(b < a) && !isnan(a) && !isnan(b); }
  friend bool operator>=(const DoubleDouble& a, const DoubleDouble& b) { return b <= a; }

  friend std::ostream& operator<<(std::ostream& os, const DoubleDouble& a)
  {
    return os << '(' << a.hi << " + " << a.lo << ')';
  }

private:
  static constexpr DoubleDouble raw(double h, double l)
  {
    DoubleDouble r;
    r.hi = h;
    r.lo = l;
    return r;
  }

  static DoubleDouble renorm(double a, double b)
  {
    DoubleDouble r;
    dd_detail::quick_two_sum(a, b, r.hi, r.lo);
    if (!std::isfinite(r.hi))
      r.lo = 0.0;
    return r;
  }

  static DoubleDouble mul_double(const DoubleDouble& a, double b)
  {
    double p, e;
    dd_detail::two_prod(a.hi, b, p, e);
    e = std::fma(a.lo, b, e);
    return renorm(p, e);
  }
};

//
// Runtime precision identifiers.
//

enum class PrecisionId
{
  Single,
  Double,
  DoubleDouble
};

inline double unit_roundoff(PrecisionId p)
{
  switch (p)
  {
    case PrecisionId::Single:
      return std::ldexp(1.0, -24);
    case PrecisionId::Double:
      return std::ldexp(1.0, -53);
    case PrecisionId::DoubleDouble:
      return std::ldexp(1.0, -104);
  }
  throw std::invalid_argument("unregistered precision");
}

inline std::string_view to_string(PrecisionId p)
{
  switch (p)
  {
    case PrecisionId::Single:
      return "single";
    case PrecisionId::Double:
      return "double";
    case PrecisionId::DoubleDouble:
      return "double_double";
  }
  return "?";
}

inline std::optional<PrecisionId> parse_precision(std::string_view name)
{
  if (name == "single")
    return PrecisionId::Single;
  if (name == "double")
    return PrecisionId::Double;
  if (name == "double_double")
    return PrecisionId::DoubleDouble;
  return std::nullopt;
}

/// Working (low) and high precision of a two-precision run; the high
/// precision is never coarser than the low one.
class PrecisionPair
{
public:
  PrecisionPair(PrecisionId low, PrecisionId high) : low_(low), high_(high)
  {
    if (unit_roundoff(high) > unit_roundoff(low))
      throw std::invalid_argument("precision pair requires unit_roundoff(high) <= unit_roundoff(low)");
  }

  PrecisionId low() const { return low_; }
  PrecisionId high() const { return high_; }

  std::string label() const
  {
    return std::string(to_string(low_)) + "/" + std::string(to_string(high_));
  }

  friend bool operator==(const PrecisionPair&, const PrecisionPair&) = default;

private:
  PrecisionId low_;
  PrecisionId high_;
};

//
// Compile-time view of the same registry, used by the templated kernels.
//

template <typename T>
struct precision_traits;

template <>
struct precision_traits<float>
{
  static constexpr PrecisionId id = PrecisionId::Single;
  static constexpr int rank = 0;
};

template <>
struct precision_traits<double>
{
  static constexpr PrecisionId id = PrecisionId::Double;
  static constexpr int rank = 1;
};

template <>
struct precision_traits<DoubleDouble>
{
  static constexpr PrecisionId id = PrecisionId::DoubleDouble;
  static constexpr int rank = 2;
};

template <typename T>
concept Scalar = requires { precision_traits<T>::id; };

template <Scalar T>
inline double unit_roundoff() { return unit_roundoff(precision_traits<T>::id); }

//
// Conversions. Promotion is exact; demotion rounds to nearest-even. NaN and
// Inf pass through, overflow yields a signed infinity.
//

namespace detail
{

inline float round_to_float(const DoubleDouble& x)
{
  const float f = static_cast<float>(x.hi);
  if (x.lo == 0.0 || !std::isfinite(x.hi) || static_cast<double>(f) == x.hi)
    return f;
  // x.hi sits strictly between two floats; only an exact midpoint can be
  // resolved the wrong way, and then lo decides.
  const float other = std::nextafter(f, static_cast<double>(f) < x.hi ? std::numeric_limits<float>::infinity()
                                                                      : -std::numeric_limits<float>::infinity());
  const double mid = 0.5 * (static_cast<double>(f) + static_cast<double>(other));
  if (x.hi != mid)
    return f;
  const float below = std::min(f, other);
  const float above = std::max(f, other);
  return x.lo > 0.0 ? above : below;
}

} // namespace detail

template <Scalar To, Scalar From>
inline To convert(const From& x)
{
  if constexpr (std::is_same_v<To, From>)
    return x;
  else if constexpr (std::is_same_v<To, DoubleDouble>)
    return DoubleDouble(static_cast<double>(x));
  else if constexpr (std::is_same_v<From, DoubleDouble>)
  {
    if constexpr (std::is_same_v<To, double>)
      return x.hi + x.lo;
    else
      return detail::round_to_float(x);
  }
  else
    return static_cast<To>(x);
}

/// Rounds a high-precision value into the low precision.
template <Scalar Low, Scalar High>
  requires(precision_traits<Low>::rank <= precision_traits<High>::rank)
inline Low demote(const High& x)
{
  return convert<Low>(x);
}

/// Exact widening of a low-precision value.
template <Scalar High, Scalar Low>
  requires(precision_traits<Low>::rank <= precision_traits<High>::rank)
inline High promote(const Low& x)
{
  return convert<High>(x);
}

// Scalar helpers usable uniformly for float, double and DoubleDouble.
template <Scalar T>
inline double to_double(const T& x)
{
  return convert<double>(x);
}

template <Scalar T>
inline bool scalar_isnan(const T& x)
{
  using std::isnan;
  return isnan(x);
}

template <Scalar T>
inline T scalar_sqrt(const T& x)
{
  using std::sqrt;
  return sqrt(x);
}

template <Scalar T>
inline T scalar_abs(const T& x)
{
  using std::abs;
  return abs(x);
}

} // namespace bgspip

#endif
