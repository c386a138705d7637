#pragma once

// Finite subgroups of the unit sphere S(F): cyclic groups, binary dihedral
// groups, and the three exceptional binary polyhedral groups T*, O*, I*.
// A group is stored as its explicit element list plus a Cayley table built by
// nearest-element matching; the constructor fails loudly if the list is not
// closed under multiplication to within a tight tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "equipart/algebra.hpp"

namespace equipart {

inline constexpr double kGroupMatchTol = 1e-9;

namespace detail {

inline std::uint64_t fnv1a64(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

inline std::uint64_t hash_rounded(std::uint64_t h, double x) {
  // Snap to a 1e-9 grid so fingerprints are stable across formation order.
  auto v = static_cast<std::int64_t>(std::llround(x * 1e9));
  if (v == 0) v = 0;  // normalize -0
  return fnv1a64(h, &v, sizeof v);
}

}  // namespace detail

/// A finite subgroup of S(F) with identity at index 0 and a full Cayley table.
struct FiniteSubgroup {
  Algebra algebra = Algebra::R;
  std::vector<FScalar> elements;            // elements[0] == 1
  std::vector<std::vector<int>> cayley;     // cayley[a][b] = index of a*b
  std::vector<int> inverses;                // inverses[a]*a == identity
  std::uint64_t fingerprint = 0;            // content hash, ties automorphisms to groups
  std::string label;                        // e.g. "C_6", "D*_3", "T*"

  int order() const { return static_cast<int>(elements.size()); }
  int mul(int a, int b) const { return cayley[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inv(int a) const { return inverses[static_cast<std::size_t>(a)]; }
  const FScalar& element(int a) const { return elements[static_cast<std::size_t>(a)]; }
};

/// Index of the element of `elements` nearest to `s`, or -1 if none is within `tol`.
inline int find_element(const std::vector<FScalar>& elements, const FScalar& s,
                        double tol = kGroupMatchTol) {
  int best = -1;
  double best_d2 = tol * tol;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const double d2 = distance_sq(elements[k], s);
    if (d2 <= best_d2) {
      best_d2 = d2;
      best = static_cast<int>(k);
    }
  }
  return best;
}

inline int find_element(const FiniteSubgroup& G, const FScalar& s,
                        double tol = kGroupMatchTol) {
  return find_element(G.elements, s, tol);
}

/// Builds the Cayley table, inverses, and fingerprint for an explicit element
/// list.  Requires the identity at index 0, unit norms, distinct elements, and
/// closure under multiplication; throws std::invalid_argument otherwise.
inline FiniteSubgroup build_group(Algebra a, std::vector<FScalar> elements,
                                  std::string label = {}) {
  const int n = static_cast<int>(elements.size());
  if (n == 0) throw std::invalid_argument("build_group: empty element list");
  for (const auto& g : elements) {
    if (g.algebra() != a)
      throw std::invalid_argument("build_group: element algebra mismatch");
    if (std::abs(norm(g) - 1.0) > kGroupMatchTol)
      throw std::invalid_argument("build_group: element off the unit sphere");
  }
  if (!approx_equal(elements[0], FScalar::one(a), kGroupMatchTol))
    throw std::invalid_argument("build_group: identity must sit at index 0");
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      if (approx_equal(elements[static_cast<std::size_t>(p)],
                       elements[static_cast<std::size_t>(q)], kGroupMatchTol))
        throw std::invalid_argument("build_group: duplicate elements at indices " +
                                    std::to_string(p) + " and " + std::to_string(q));

  FiniteSubgroup G;
  G.algebra = a;
  G.elements = std::move(elements);
  G.label = std::move(label);
  G.cayley.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  G.inverses.assign(static_cast<std::size_t>(n), -1);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const FScalar prod = G.element(p) * G.element(q);
      const int r = find_element(G.elements, prod);
      if (r < 0)
        throw std::invalid_argument("build_group: not closed, product of elements " +
                                    std::to_string(p) + " * " + std::to_string(q) +
                                    " matches no listed element");
      G.cayley[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = r;
      if (r == 0) G.inverses[static_cast<std::size_t>(p)] = q;
    }
  }
  for (int p = 0; p < n; ++p)
    if (G.inverses[static_cast<std::size_t>(p)] < 0)
      throw std::invalid_argument("build_group: element " + std::to_string(p) +
                                  " has no inverse in the list");

  std::uint64_t h = detail::kFnvOffset;
  h = detail::fnv1a64(h, &a, sizeof a);
  for (const auto& g : G.elements)
    for (int k = 0; k < 4; ++k) h = detail::hash_rounded(h, g[k]);
  G.fingerprint = h;
  return G;
}

/// C_m = {zeta_m^p : p = 0..m-1} inside the 1,i-plane of `a`.
/// Over R only m = 2 exists (the sign group).
inline FiniteSubgroup cyclic_group(int m, Algebra a) {
  if (m < 2) throw std::invalid_argument("cyclic_group: order must be at least 2");
  if (a == Algebra::R && m > 2)
    throw std::invalid_argument("cyclic_group: S(R) = {+1,-1} only admits C_2");
  std::vector<FScalar> elems;
  elems.reserve(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    const double th = 2.0 * std::numbers::pi * p / m;
    if (a == Algebra::R)
      elems.push_back(FScalar::real(p == 0 ? 1.0 : -1.0));
    else
      elems.push_back(unit_angle(a, th));
  }
  return build_group(a, std::move(elems), "C_" + std::to_string(m));
}

/// Binary dihedral group D*_m of order 4m in S(H):
/// indices 0..2m-1 are zeta_{2m}^p, indices 2m..4m-1 are zeta_{2m}^q * j.
inline FiniteSubgroup binary_dihedral_group(int m) {
  if (m < 2) throw std::invalid_argument("binary_dihedral_group: m must be at least 2");
  const FScalar j = FScalar::quaternion(0, 0, 1, 0);
  std::vector<FScalar> elems;
  elems.reserve(static_cast<std::size_t>(4 * m));
  for (int p = 0; p < 2 * m; ++p)
    elems.push_back(unit_angle(Algebra::H, std::numbers::pi * p / m));
  for (int q = 0; q < 2 * m; ++q)
    elems.push_back(unit_angle(Algebra::H, std::numbers::pi * q / m) * j);
  return build_group(Algebra::H, std::move(elems), "D*_" + std::to_string(m));
}

namespace detail {

inline bool quat_lex_less(const FScalar& a, const FScalar& b) {
  for (int k = 0; k < 4; ++k) {
    const double da = std::round(a[k] * 1e9);
    const double db = std::round(b[k] * 1e9);
    if (da != db) return da < db;
  }
  return false;
}

inline std::vector<FScalar> unit_quaternions_24() {
  std::vector<FScalar> out;
  for (int axis = 0; axis < 4; ++axis)
    for (int s : {1, -1}) {
      double c[4] = {0, 0, 0, 0};
      c[axis] = s;
      out.push_back(FScalar::quaternion(c[0], c[1], c[2], c[3]));
    }
  for (int s0 : {1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1})
        for (int s3 : {1, -1})
          out.push_back(FScalar::quaternion(0.5 * s0, 0.5 * s1, 0.5 * s2, 0.5 * s3));
  return out;
}

}  // namespace detail

/// Binary polyhedral groups: name in {"T*","O*","I*"} of orders 24, 48, 120.
/// The identity leads; the remaining elements are sorted lexicographically by
/// coordinates so the listing is canonical.
inline FiniteSubgroup binary_polyhedral_group(const std::string& name) {
  std::vector<FScalar> elems;
  if (name == "T*") {
    elems = detail::unit_quaternions_24();
  } else if (name == "O*") {
    elems = detail::unit_quaternions_24();
    const double r = 1.0 / std::numbers::sqrt2;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int sa : {1, -1})
          for (int sb : {1, -1}) {
            double c[4] = {0, 0, 0, 0};
            c[a] = r * sa;
            c[b] = r * sb;
            elems.push_back(FScalar::quaternion(c[0], c[1], c[2], c[3]));
          }
  } else if (name == "I*") {
    elems = detail::unit_quaternions_24();
    const double phi = std::numbers::phi;
    const double base[4] = {phi / 2, 0.5, (phi - 1.0) / 2, 0.0};
    int perm[4] = {0, 1, 2, 3};
    do {
      int inversions = 0;
      for (int p = 0; p < 4; ++p)
        for (int q = p + 1; q < 4; ++q)
          if (perm[p] > perm[q]) ++inversions;
      if (inversions % 2 != 0) continue;
      for (int s0 : {1, -1})
        for (int s1 : {1, -1})
          for (int s2 : {1, -1}) {
            // Signs attach to the value slots (phi/2, 1/2, 1/(2phi)); the zero
            // slot takes no sign, so every even permutation yields 8 elements.
            const int sign[4] = {s0, s1, s2, 1};
            double c[4];
            for (int p = 0; p < 4; ++p) c[p] = sign[perm[p]] * base[perm[p]];
            elems.push_back(FScalar::quaternion(c[0], c[1], c[2], c[3]));
          }
    } while (std::next_permutation(perm, perm + 4));
  } else {
    throw std::invalid_argument("binary_polyhedral_group: unknown name " + name);
  }
  std::sort(elems.begin() + 1, elems.end(), detail::quat_lex_less);
  // Dedup guards against sign choices that collapse on the zero coordinate.
  elems.erase(std::unique(elems.begin(), elems.end(),
                          [](const FScalar& x, const FScalar& y) {
                            return approx_equal(x, y, kGroupMatchTol);
                          }),
              elems.end());
  return build_group(Algebra::H, std::move(elems), name);
}

inline FiniteSubgroup quaternion_group() {
  // Q_8 = D*_2 in the canonical ordering {1, zeta_4, -1, -zeta_4, j, ...}.
  return binary_dihedral_group(2);
}

/// True when the group's Cayley table is addition mod n in listing order,
/// i.e. elements[p] = elements[1]^p.  Cyclic groups built here satisfy this.
inline bool is_canonical_cyclic(const FiniteSubgroup& G) {
  const int n = G.order();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (G.mul(p, q) != (p + q) % n) return false;
  return true;
}

/// A group automorphism recorded as the permutation g_p -> g_perm[p] of
/// element indices, pinned to a specific group by fingerprint.
struct Automorphism {
  std::vector<int> perm;
  std::uint64_t group_fingerprint = 0;

  int order() const { return static_cast<int>(perm.size()); }
  int operator()(int p) const { return perm[static_cast<std::size_t>(p)]; }
};

namespace detail {

/// Empty string when `perm` is an automorphism of G; otherwise a description
/// of the first violation (non-bijectivity or a witness pair).
inline std::string automorphism_violation(const FiniteSubgroup& G,
                                          const std::vector<int>& perm) {
  const int n = G.order();
  if (static_cast<int>(perm.size()) != n)
    return "permutation length " + std::to_string(perm.size()) +
           " does not match group order " + std::to_string(n);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : perm) {
    if (v < 0 || v >= n) return "index " + std::to_string(v) + " out of range";
    if (seen[static_cast<std::size_t>(v)])
      return "index " + std::to_string(v) + " appears twice (not a bijection)";
    seen[static_cast<std::size_t>(v)] = 1;
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (perm[static_cast<std::size_t>(G.mul(p, q))] !=
          G.mul(perm[static_cast<std::size_t>(p)], perm[static_cast<std::size_t>(q)]))
        return "homomorphism fails on witness pair (" + std::to_string(p) + ", " +
               std::to_string(q) + "): phi(g_p * g_q) != phi(g_p) * phi(g_q)";
  return {};
}

}  // namespace detail

/// True iff `perm` is a bijection on indices that preserves the Cayley table.
inline bool is_automorphism(const FiniteSubgroup& G, const std::vector<int>& perm) {
  return detail::automorphism_violation(G, perm).empty();
}

/// Accepts a candidate permutation after the exhaustive homomorphism check;
/// throws std::invalid_argument naming a witness pair on failure.
inline Automorphism validate_automorphism(const FiniteSubgroup& G, std::vector<int> perm) {
  const std::string why = detail::automorphism_violation(G, perm);
  if (!why.empty()) throw std::invalid_argument("validate_automorphism: " + why);
  return Automorphism{std::move(perm), G.fingerprint};
}

inline Automorphism identity_automorphism(const FiniteSubgroup& G) {
  std::vector<int> perm(static_cast<std::size_t>(G.order()));
  std::iota(perm.begin(), perm.end(), 0);
  return Automorphism{std::move(perm), G.fingerprint};
}

/// The power map g -> g^r on a cyclic group in canonical order; requires
/// gcd(r, |G|) = 1 so the map is invertible.
inline Automorphism cyclic_automorphism(const FiniteSubgroup& G, int r) {
  const int n = G.order();
  if (!is_canonical_cyclic(G))
    throw std::invalid_argument("cyclic_automorphism: group is not cyclic in listing order");
  const int rr = ((r % n) + n) % n;
  if (std::gcd(rr, n) != 1)
    throw std::invalid_argument("cyclic_automorphism: exponent shares a factor with |G|");
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p)
    perm[static_cast<std::size_t>(p)] = static_cast<int>((static_cast<long long>(p) * rr) % n);
  return Automorphism{std::move(perm), G.fingerprint};
}

inline void require_matching_group(const FiniteSubgroup& G, const Automorphism& phi,
                                   const char* where) {
  if (phi.group_fingerprint != G.fingerprint || phi.order() != G.order())
    throw std::invalid_argument(std::string(where) +
                                ": automorphism belongs to a different group");
}

/// Left cosets of a subgroup H <= G.  `subgroup` lists H's element indices in
/// ascending order; coset l has representative `representatives[l]` (the
/// smallest index not yet covered) and members[l][t] = rep_l * h_t.
struct CosetDecomposition {
  std::vector<int> subgroup;
  std::vector<int> representatives;
  std::vector<std::vector<int>> members;

  int count() const { return static_cast<int>(representatives.size()); }
  int subgroup_order() const { return static_cast<int>(subgroup.size()); }
};

inline CosetDecomposition cosets(const FiniteSubgroup& G, std::vector<int> subgroup) {
  const int n = G.order();
  std::sort(subgroup.begin(), subgroup.end());
  if (subgroup.empty() || subgroup.front() != 0)
    throw std::invalid_argument("cosets: subgroup must contain the identity (index 0)");
  for (std::size_t t = 1; t < subgroup.size(); ++t)
    if (subgroup[t] == subgroup[t - 1] || subgroup[t] >= n)
      throw std::invalid_argument("cosets: subgroup indices must be distinct and in range");
  std::vector<char> in_h(static_cast<std::size_t>(n), 0);
  for (int t : subgroup) in_h[static_cast<std::size_t>(t)] = 1;
  for (int p : subgroup) {
    if (!in_h[static_cast<std::size_t>(G.inv(p))])
      throw std::invalid_argument("cosets: subgroup not closed under inverses");
    for (int q : subgroup)
      if (!in_h[static_cast<std::size_t>(G.mul(p, q))])
        throw std::invalid_argument("cosets: subgroup not closed under multiplication");
  }

  CosetDecomposition dec;
  dec.subgroup = std::move(subgroup);
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  for (int g = 0; g < n; ++g) {
    if (covered[static_cast<std::size_t>(g)]) continue;
    std::vector<int> coset;
    coset.reserve(dec.subgroup.size());
    for (int t : dec.subgroup) {
      const int m = G.mul(g, t);
      covered[static_cast<std::size_t>(m)] = 1;
      coset.push_back(m);
    }
    dec.representatives.push_back(g);
    dec.members.push_back(std::move(coset));
  }
  return dec;
}

/// Permutation g -> -g, defined whenever -1 lies in G (throws otherwise).
inline std::vector<int> negation_permutation(const FiniteSubgroup& G) {
  const int neg_one = find_element(G, -FScalar::one(G.algebra));
  if (neg_one < 0)
    throw std::invalid_argument("negation_permutation: -1 is not an element of " +
                                (G.label.empty() ? std::string("the group") : G.label));
  std::vector<int> perm(static_cast<std::size_t>(G.order()));
  for (int p = 0; p < G.order(); ++p) perm[static_cast<std::size_t>(p)] = G.mul(neg_one, p);
  return perm;
}

}  // namespace equipart
