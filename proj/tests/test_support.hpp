#pragma once

// Shared builders for the test suite: seeded clouds and orbit instances.

#include <cstdint>
#include <limits>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/groups.hpp"
#include "equipart/measures.hpp"
#include "equipart/rng.hpp"

namespace testutil {

using namespace equipart;

inline FVector gaussian_point(Algebra a, int n, std::uint64_t seed,
                              std::uint64_t index) {
  const int D = dim(a) * n;
  std::vector<double> c(static_cast<std::size_t>(D));
  for (int t = 0; 2 * t < D; ++t) {
    const auto [g1, g2] = rng::gaussian_pair(seed, index, static_cast<std::uint64_t>(t));
    c[static_cast<std::size_t>(2 * t)] = g1;
    if (2 * t + 1 < D) c[static_cast<std::size_t>(2 * t + 1)] = g2;
  }
  return FVector::from_reals(a, c);
}

/// n_plus atoms of weight +1 followed by n_minus of weight -1, positions
/// standard Gaussian.  Total mass n_plus - n_minus (caller keeps it nonzero).
inline MassDistribution signed_cloud(Algebra a, int n, int n_plus, int n_minus,
                                     std::uint64_t seed) {
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n_plus + n_minus));
  for (int i = 0; i < n_plus + n_minus; ++i)
    atoms.push_back(Atom{gaussian_point(a, n, seed, static_cast<std::uint64_t>(i)),
                         (i < n_plus ? 1.0 : -1.0) * FScalar::one(a)});
  return MassDistribution::point_cloud(a, n, std::move(atoms));
}

/// The G-orbit of x0 (n = 1), every atom with the same real weight.
inline MassDistribution orbit_cloud(const FiniteSubgroup& G, const FScalar& x0,
                                    double weight) {
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(G.order()));
  for (int g = 0; g < G.order(); ++g)
    atoms.push_back(Atom{FVector(G.algebra, {G.element(g) * x0}),
                         weight * FScalar::one(G.algebra)});
  return MassDistribution::point_cloud(G.algebra, 1, std::move(atoms));
}

inline FVector random_unit(Algebra a, int entries, std::uint64_t seed,
                           std::uint64_t index) {
  const FVector v = gaussian_point(a, entries, seed, index);
  return (1.0 / norm(v)) * v;
}

/// Squared-distance gap between the best and second-best site for v.
inline double tie_gap(const FScalar& v, const FiniteSubgroup& G) {
  double best = std::numeric_limits<double>::infinity(), second = best;
  for (int g = 0; g < G.order(); ++g) {
    const double d = distance_sq(v, G.element(g));
    if (d < best) {
      second = best;
      best = d;
    } else if (d < second) {
      second = d;
    }
  }
  return second - best;
}

}  // namespace testutil
