// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_RNG_HPP
#define BGSPIP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bgspip
{

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw c of stream (seed, stream) is a pure
/// function of the three integers, so streams can be split freely and the
/// output does not depend on platform or call interleaving.
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL)))
  {
  }

  std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + mix64(counter ^ 0xd1b54a32d192ed03ULL)); }

  std::uint64_t next() { return at(counter_++); }

  /// Independent child stream.
  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; draws come in pairs.
  double normal()
  {
    if (has_spare_)
    {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace bgspip

#endif
