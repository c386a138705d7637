#pragma once

// G-Voronoi partition geometry.  A sphere point u = (u_0, u_1..u_n) in
// S(F^{n+1}) determines the partition of F^n whose region for g collects the
// points x whose fiber value v = <x,(u_1..u_n)> + conj(u_0) is nearest to g
// among the group elements.  Working with u directly (rather than the
// normalized hyperplane view (a, b)) keeps classification total at the poles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/groups.hpp"

namespace equipart {

inline constexpr double kTieTol = 1e-9;   // on squared-distance differences
inline constexpr double kPoleTol = 1e-9;  // on ||(u_1..u_n)||
inline constexpr double kUnitTol = 1e-12;

/// One G-Voronoi partition of F^n, parametrized by a unit vector in F^{n+1}.
struct PartitionParams {
  FVector u;

  Algebra algebra() const { return u.algebra(); }
  int ambient_dim() const { return u.size() - 1; }
  const FScalar& u0() const { return u[0]; }

  /// The last n entries (u_1..u_n) as a vector in F^n.
  FVector tail() const {
    FVector t = FVector::zero(u.algebra(), u.size() - 1);
    for (int i = 1; i < u.size(); ++i) t[i - 1] = u[i];
    return t;
  }
  double tail_norm() const {
    double s = 0;
    for (int i = 1; i < u.size(); ++i) s += norm_sq(u[i]);
    return std::sqrt(s);
  }
  bool at_pole() const { return tail_norm() <= kPoleTol; }
};

/// Validating constructor: u must have at least two F-entries and unit norm.
inline PartitionParams make_params(FVector u) {
  if (u.size() < 2)
    throw std::invalid_argument("make_params: u needs at least 2 entries (n >= 1)");
  if (std::abs(norm(u) - 1.0) > kUnitTol)
    throw std::invalid_argument("make_params: u must lie on the unit sphere");
  return PartitionParams{std::move(u)};
}

/// Rescales u onto the sphere first; throws on (near-)zero input.
inline PartitionParams normalized_params(const FVector& u) {
  const double n = norm(u);
  if (n < 1e-12) throw std::invalid_argument("normalized_params: zero vector");
  return make_params((1.0 / n) * u);
}

/// The hyperplane view a = (u_1..u_n)/||..||, b = -u_0/||..||; undefined at poles.
struct ABView {
  bool defined = false;
  FVector a;
  FScalar b;
};

inline ABView ab_view(const PartitionParams& p) {
  ABView v;
  const double tn = p.tail_norm();
  if (tn <= kPoleTol) return v;
  v.defined = true;
  v.a = (1.0 / tn) * p.tail();
  v.b = (-1.0 / tn) * p.u0();
  return v;
}

/// Region assignment of a fiber value: the nearest group elements, all indices
/// within the tie tolerance, sorted ascending.  Measure code resolves a
/// boundary hit to the smallest tied index.
struct CellAssignment {
  std::vector<int> tied;

  int region() const { return tied.front(); }
  bool boundary() const { return tied.size() > 1; }
};

inline CellAssignment voronoi_cell_of(const FScalar& v, const FiniteSubgroup& G) {
  if (v.algebra() != G.algebra)
    throw std::invalid_argument("voronoi_cell_of: algebra mismatch");
  const int n = G.order();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    d2[static_cast<std::size_t>(g)] = distance_sq(v, G.element(g));
    best = std::min(best, d2[static_cast<std::size_t>(g)]);
  }
  CellAssignment out;
  for (int g = 0; g < n; ++g)
    if (d2[static_cast<std::size_t>(g)] - best <= kTieTol) out.tied.push_back(g);
  return out;
}

struct ClassifiedPoint {
  CellAssignment cell;
  FScalar fiber_value;

  int region() const { return cell.region(); }
  bool boundary() const { return cell.boundary(); }
};

/// Fiber value v(x; u) = <x, (u_1..u_n)>_F + conj(u_0); x lies in region g
/// exactly when v is nearest to g.  At a pole v is constant, so a single
/// region swallows all of F^n.
inline FScalar fiber_value(const FVector& x, const PartitionParams& p) {
  if (x.algebra() != p.algebra() || x.size() != p.ambient_dim())
    throw std::invalid_argument("fiber_value: x does not match params");
  FScalar v = conj(p.u0());
  for (int i = 0; i < x.size(); ++i) v += x[i] * conj(p.u[i + 1]);
  return v;
}

inline ClassifiedPoint classify(const FVector& x, const PartitionParams& p,
                                const FiniteSubgroup& G) {
  if (G.algebra != p.algebra())
    throw std::invalid_argument("classify: group/params algebra mismatch");
  const FScalar v = fiber_value(x, p);
  return ClassifiedPoint{voronoi_cell_of(v, G), v};
}

/// The sphere action: multiplies every entry of u by g on the left.  Regions
/// transform as R_{g1}(g2 u) = R_{g1 g2}(u).
inline PartitionParams act(const FiniteSubgroup& G, int g, const PartitionParams& p) {
  if (G.algebra != p.algebra())
    throw std::invalid_argument("act: group/params algebra mismatch");
  FVector v = p.u;
  for (int i = 0; i < v.size(); ++i) v[i] = G.element(g) * v[i];
  return PartitionParams{std::move(v)};
}

/// One half-hyperplane of a fan: {x : <x,a> = conj(b) + t*lambda, t >= 0}.
struct FanBoundary {
  FVector a;
  FScalar b;
  FScalar lambda;
};

/// The m boundary half-hyperplanes of the regular m-fan cut by C_m over C.
/// Under the nearest-site rule the boundary directions sit halfway between
/// consecutive roots of unity: lambda_k = exp(i*pi*(2k+1)/m).
inline std::vector<FanBoundary> fan_boundary(const PartitionParams& p,
                                             const FiniteSubgroup& G) {
  if (G.algebra != Algebra::C || p.algebra() != Algebra::C)
    throw std::invalid_argument("fan_boundary: defined for F = C only");
  if (!is_canonical_cyclic(G))
    throw std::invalid_argument("fan_boundary: group must be cyclic");
  const ABView view = ab_view(p);
  if (!view.defined)
    throw std::invalid_argument("fan_boundary: params sit at a pole");
  const int m = G.order();
  std::vector<FanBoundary> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double th = std::numbers::pi * (2 * k + 1) / m;
    out.push_back(FanBoundary{view.a, view.b, unit_angle(Algebra::C, th)});
  }
  return out;
}

/// Distance-like margin of u from the excluded set X_G (pole points whose u_0
/// direction lies on a Voronoi cell boundary in S(F)).  Zero exactly on X_G;
/// combines the tail norm with the chordal distance of u_0/||u_0|| from the
/// nearest cell bisector.
inline double excluded_set_margin(const PartitionParams& p, const FiniteSubgroup& G) {
  if (G.algebra != p.algebra())
    throw std::invalid_argument("excluded_set_margin: algebra mismatch");
  const double tn = p.tail_norm();
  double bdist = 0.0;
  const double u0n = norm(p.u0());
  if (u0n > kPoleTol) {
    if (G.order() == 1) {
      bdist = 1.0;  // no boundaries at all: X_G is empty
    } else {
      const FScalar s = (1.0 / u0n) * p.u0();
      const int g1 = voronoi_cell_of(s, G).tied.front();
      bdist = std::numeric_limits<double>::infinity();
      for (int g = 0; g < G.order(); ++g) {
        if (g == g1) continue;
        const FScalar diff = G.element(g1) - G.element(g);
        double dot = 0;
        for (int k = 0; k < 4; ++k) dot += s[k] * diff[k];
        bdist = std::min(bdist, std::abs(dot) / norm(diff));
      }
    }
  }
  return std::hypot(tn, bdist);
}

/// Facet-neighbor counts of the Voronoi cells of a quaternionic group,
/// estimated from bisector midpoints: cells g and g' share a facet exactly
/// when (g+g')/||g+g'|| ties two ways between g and g' and nothing else.
inline std::vector<int> cell_adjacency(const FiniteSubgroup& G) {
  if (G.algebra != Algebra::H)
    throw std::invalid_argument("cell_adjacency: defined for quaternionic groups");
  if (G.order() < 3)
    throw std::invalid_argument("cell_adjacency: group order must be at least 3");
  std::vector<int> counts(static_cast<std::size_t>(G.order()), 0);
  for (int p = 0; p < G.order(); ++p) {
    for (int q = p + 1; q < G.order(); ++q) {
      const FScalar sum = G.element(p) + G.element(q);
      const double n = norm(sum);
      if (n <= kPoleTol) continue;  // antipodal pair, bisector through 0
      const CellAssignment cell = voronoi_cell_of((1.0 / n) * sum, G);
      if (cell.tied.size() == 2 && cell.tied[0] == p && cell.tied[1] == q) {
        ++counts[static_cast<std::size_t>(p)];
        ++counts[static_cast<std::size_t>(q)];
      }
    }
  }
  return counts;
}

}  // namespace equipart
