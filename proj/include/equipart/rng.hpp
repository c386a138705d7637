#pragma once

// Counter-based deterministic random numbers.  Every variate is a pure
// function of (seed, index, draw), so samplers are order-independent and
// parallel-safe: worker threads can generate sample i without sharing state.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace equipart::rng {

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index,
                                  std::uint64_t draw) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ draw);
  return h;
}

/// Uniform draw in (0, 1]; never 0, so log() is safe.
inline double u01(std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
  return static_cast<double>((counter_hash(seed, index, draw) >> 11) + 1) * 0x1.0p-53;
}

/// Box-Muller pair of independent standard normals from draws (2t, 2t+1).
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t index,
                                               std::uint64_t t) {
  const double u1 = u01(seed, index, 2 * t);
  const double u2 = u01(seed, index, 2 * t + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

}  // namespace equipart::rng
