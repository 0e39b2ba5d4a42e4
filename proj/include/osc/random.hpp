#pragma once

#include <cstdint>
#include <random>

namespace osc {

// std::mt19937_64's output sequence is fixed by the standard, the library
// distributions are not. These helpers keep seeded runs identical across
// standard library implementations.
using Rng = std::mt19937_64;

/// Uniform in [lo, hi).
inline double UniformReal(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

/// Uniform in [0, n); n must be > 0.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace osc
