#pragma once

// F-valued mass distributions and evaluation of region measures.  The working
// model is a finite atom list; absolutely continuous densities are reduced to
// atoms by deterministic Monte Carlo sampling at construction time.
//
// Caveat for users: atoms can land exactly on region boundaries, where the
// nearest-site rule breaks ties toward the smallest group element index and
// reports the affected mass in boundary_mass.  Generic (perturbed) clouds
// avoid this with probability 1.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/groups.hpp"
#include "equipart/partition.hpp"
#include "equipart/rng.hpp"

namespace equipart {

/// Compensated (Neumaier) accumulator: deterministic, near-exact sums that
/// keep the additivity identity sum_g mu(R_g) = mu(F^n) tight.
struct NeumaierSum {
  double s = 0.0, c = 0.0;

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct Atom {
  FVector x;
  FScalar w;
};

/// Uniform-density support shapes for sampled distributions, described in the
/// flattened real coordinates of F^n (length dim(F)*n).
struct SupportSpec {
  enum class Kind { Ball, Box, Annulus };
  Kind kind = Kind::Ball;
  std::vector<double> center;  // ball / annulus
  double radius = 1.0;         // ball
  double r_inner = 0.0;        // annulus
  double r_outer = 1.0;        // annulus
  std::vector<double> lo, hi;  // box corners
};

class MassDistribution {
 public:
  /// Finite atom list; rejects (near-)zero total mass.
  static MassDistribution point_cloud(Algebra a, int n, std::vector<Atom> atoms) {
    MassDistribution d = assemble(a, n, std::move(atoms));
    if (norm(d.total_) <= 1e-12)
      throw std::invalid_argument(
          "point_cloud: total mass must be nonzero (got norm " +
          std::to_string(norm(d.total_)) + ")");
    return d;
  }

  /// Internal factory for signed component parts, which may sum to zero.
  static MassDistribution component_cloud(Algebra a, int n, std::vector<Atom> atoms) {
    return assemble(a, n, std::move(atoms));
  }

  /// N equal-weight samples (weight 1/N) drawn uniformly from the support.
  /// Sample i depends only on (seed, i), never on evaluation order.
  static MassDistribution sampled_density(Algebra a, int n, const SupportSpec& sup,
                                          int N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("sampled_density: N must be positive");
    const int D = dim(a) * n;
    validate_support(sup, D);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(N));
    const FScalar w = FScalar::embed(a, FScalar::real(1.0 / N));
    std::vector<double> coords(static_cast<std::size_t>(D));
    for (int i = 0; i < N; ++i) {
      sample_support(sup, D, seed, static_cast<std::uint64_t>(i), coords);
      atoms.push_back(Atom{FVector::from_reals(a, coords), w});
    }
    MassDistribution d = assemble(a, n, std::move(atoms));
    d.sampled_ = true;
    d.sample_count_ = N;
    d.seed_ = seed;
    return d;
  }

  Algebra algebra() const { return alg_; }
  int ambient_dim() const { return n_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const FScalar& total() const { return total_; }
  bool is_sampled() const { return sampled_; }
  int sample_count() const { return sample_count_; }
  std::uint64_t seed() const { return seed_; }

 private:
  static MassDistribution assemble(Algebra a, int n, std::vector<Atom> atoms) {
    if (n < 1) throw std::invalid_argument("MassDistribution: ambient dimension must be >= 1");
    for (const auto& atom : atoms) {
      if (atom.x.algebra() != a || atom.w.algebra() != a)
        throw std::invalid_argument("MassDistribution: atom algebra mismatch");
      if (atom.x.size() != n)
        throw std::invalid_argument("MassDistribution: atom dimension mismatch");
      for (int k = 0; k < dim(a); ++k)
        if (!std::isfinite(atom.w[k]))
          throw std::invalid_argument("MassDistribution: non-finite weight");
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < dim(a); ++k)
          if (!std::isfinite(atom.x[i][k]))
            throw std::invalid_argument("MassDistribution: non-finite position");
    }
    MassDistribution d;
    d.alg_ = a;
    d.n_ = n;
    d.atoms_ = std::move(atoms);
    NeumaierSum comp[4];
    for (const auto& atom : d.atoms_)
      for (int k = 0; k < 4; ++k) comp[k].add(atom.w[k]);
    double t[4] = {comp[0].value(), comp[1].value(), comp[2].value(), comp[3].value()};
    d.total_ = FScalar(a, std::span<const double>(t, static_cast<std::size_t>(dim(a))));
    return d;
  }

  static void validate_support(const SupportSpec& sup, int D) {
    switch (sup.kind) {
      case SupportSpec::Kind::Ball:
        if (static_cast<int>(sup.center.size()) != D)
          throw std::invalid_argument("sampled_density: ball center length != dim(F)*n");
        if (!(sup.radius > 0))
          throw std::invalid_argument("sampled_density: ball radius must be positive");
        break;
      case SupportSpec::Kind::Annulus:
        if (static_cast<int>(sup.center.size()) != D)
          throw std::invalid_argument("sampled_density: annulus center length != dim(F)*n");
        if (!(sup.r_outer > sup.r_inner) || sup.r_inner < 0)
          throw std::invalid_argument("sampled_density: annulus needs 0 <= r_inner < r_outer");
        break;
      case SupportSpec::Kind::Box:
        if (static_cast<int>(sup.lo.size()) != D || static_cast<int>(sup.hi.size()) != D)
          throw std::invalid_argument("sampled_density: box corner length != dim(F)*n");
        for (int k = 0; k < D; ++k)
          if (!(sup.hi[static_cast<std::size_t>(k)] > sup.lo[static_cast<std::size_t>(k)]))
            throw std::invalid_argument("sampled_density: box needs hi > lo per coordinate");
        break;
    }
  }

  static void sample_support(const SupportSpec& sup, int D, std::uint64_t seed,
                             std::uint64_t i, std::vector<double>& out) {
    if (sup.kind == SupportSpec::Kind::Box) {
      for (int k = 0; k < D; ++k)
        out[static_cast<std::size_t>(k)] =
            sup.lo[static_cast<std::size_t>(k)] +
            rng::u01(seed, i, static_cast<std::uint64_t>(k)) *
                (sup.hi[static_cast<std::size_t>(k)] - sup.lo[static_cast<std::size_t>(k)]);
      return;
    }
    // Ball / annulus: isotropic direction from Gaussians, radius from the
    // inverse-CDF of r^(D-1).
    double nrm2 = 0;
    for (int t = 0; 2 * t < D; ++t) {
      const auto [g1, g2] = rng::gaussian_pair(seed, i, static_cast<std::uint64_t>(t));
      out[static_cast<std::size_t>(2 * t)] = g1;
      if (2 * t + 1 < D) out[static_cast<std::size_t>(2 * t + 1)] = g2;
    }
    for (int k = 0; k < D; ++k) nrm2 += out[static_cast<std::size_t>(k)] * out[static_cast<std::size_t>(k)];
    const double nrm = std::sqrt(nrm2);
    const double u = rng::u01(seed, i, static_cast<std::uint64_t>(D + (D & 1)));
    double r;
    if (sup.kind == SupportSpec::Kind::Ball) {
      r = sup.radius * std::pow(u, 1.0 / D);
    } else {
      const double a = std::pow(sup.r_inner, D), b = std::pow(sup.r_outer, D);
      r = std::pow(a + u * (b - a), 1.0 / D);
    }
    const double scale = (nrm > 0) ? r / nrm : 0.0;
    for (int k = 0; k < D; ++k)
      out[static_cast<std::size_t>(k)] =
          sup.center[static_cast<std::size_t>(k)] + scale * out[static_cast<std::size_t>(k)];
  }

  Algebra alg_ = Algebra::R;
  int n_ = 1;
  std::vector<Atom> atoms_;
  FScalar total_;
  bool sampled_ = false;
  int sample_count_ = 0;
  std::uint64_t seed_ = 0;
};

inline FScalar total_mass(const MassDistribution& dist) { return dist.total(); }

/// Region measures mu(R_g(u)) for every g, plus the mass that landed exactly
/// on a boundary (assigned to the smallest tied index inside values).
struct RegionMeasures {
  std::vector<FScalar> values;
  FScalar boundary_mass;
  std::uint64_t group_fingerprint = 0;

  int size() const { return static_cast<int>(values.size()); }
};

inline RegionMeasures measure_regions(const MassDistribution& dist,
                                      const PartitionParams& params,
                                      const FiniteSubgroup& G) {
  if (dist.algebra() != params.algebra() || dist.algebra() != G.algebra)
    throw std::invalid_argument("measure_regions: algebra mismatch");
  if (dist.ambient_dim() != params.ambient_dim())
    throw std::invalid_argument("measure_regions: ambient dimension mismatch");
  const int m = G.order();
  std::vector<NeumaierSum> acc(static_cast<std::size_t>(4 * m));
  NeumaierSum bnd[4];
  // Index-order accumulation keeps results bit-stable.
  for (const auto& atom : dist.atoms()) {
    const ClassifiedPoint cp = classify(atom.x, params, G);
    const int g = cp.region();
    for (int k = 0; k < 4; ++k) acc[static_cast<std::size_t>(4 * g + k)].add(atom.w[k]);
    if (cp.boundary())
      for (int k = 0; k < 4; ++k) bnd[k].add(atom.w[k]);
  }
  RegionMeasures rm;
  rm.group_fingerprint = G.fingerprint;
  rm.values.reserve(static_cast<std::size_t>(m));
  const int d = dim(dist.algebra());
  for (int g = 0; g < m; ++g) {
    double c[4];
    for (int k = 0; k < 4; ++k) c[k] = acc[static_cast<std::size_t>(4 * g + k)].value();
    rm.values.push_back(FScalar(dist.algebra(), std::span<const double>(c, static_cast<std::size_t>(d))));
  }
  double b[4] = {bnd[0].value(), bnd[1].value(), bnd[2].value(), bnd[3].value()};
  rm.boundary_mass = FScalar(dist.algebra(), std::span<const double>(b, static_cast<std::size_t>(d)));
  return rm;
}

/// Splits an F-valued distribution into dim(F) real-weighted parts, one per
/// basis element of F; parts keep the positions and may have zero total.
inline std::vector<MassDistribution> component_measures(const MassDistribution& dist) {
  const Algebra a = dist.algebra();
  std::vector<MassDistribution> out;
  for (int k = 0; k < dim(a); ++k) {
    std::vector<Atom> atoms;
    atoms.reserve(dist.atoms().size());
    for (const auto& atom : dist.atoms())
      atoms.push_back(Atom{atom.x, FScalar::embed(a, FScalar::real(atom.w[k]))});
    out.push_back(MassDistribution::component_cloud(a, dist.ambient_dim(), std::move(atoms)));
  }
  return out;
}

/// Inverse of component_measures: weights recombine as sum_k w_k * b_k with
/// b_k the k-th basis element.  Bitwise-exact round trip.
inline MassDistribution recombine(const std::vector<MassDistribution>& parts) {
  if (parts.empty()) throw std::invalid_argument("recombine: no parts");
  const Algebra a = parts[0].algebra();
  const int d = dim(a);
  if (static_cast<int>(parts.size()) != d)
    throw std::invalid_argument("recombine: need one part per basis element");
  const std::size_t n_atoms = parts[0].atoms().size();
  for (const auto& p : parts)
    if (p.algebra() != a || p.atoms().size() != n_atoms ||
        p.ambient_dim() != parts[0].ambient_dim())
      throw std::invalid_argument("recombine: parts do not line up");
  std::vector<Atom> atoms;
  atoms.reserve(n_atoms);
  for (std::size_t i = 0; i < n_atoms; ++i) {
    double c[4] = {0, 0, 0, 0};
    for (int k = 0; k < d; ++k) c[k] = parts[static_cast<std::size_t>(k)].atoms()[i].w[0];
    atoms.push_back(Atom{parts[0].atoms()[i].x,
                         FScalar(a, std::span<const double>(c, static_cast<std::size_t>(d)))});
  }
  return MassDistribution::component_cloud(a, parts[0].ambient_dim(), std::move(atoms));
}

}  // namespace equipart
