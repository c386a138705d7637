#pragma once

// (G, phi)-averages of region measures and the equipartition predicates built
// on them.  The average is sum_g phi(g)^{-1} * mu(R_g) with the group scalar
// multiplied on the LEFT of the measure value; over H the order matters, and
// this is the order used throughout.

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/groups.hpp"
#include "equipart/measures.hpp"

namespace equipart {

/// Per-measure (G, phi)-averages with their norms and the aggregate residual.
struct AverageReport {
  std::vector<FScalar> averages;
  std::vector<double> residuals;  // residuals[i] = norm(averages[i])
  double aggregate = 0.0;         // sqrt(sum_i residuals[i]^2)

  static AverageReport from_averages(std::vector<FScalar> avgs) {
    AverageReport r;
    r.averages = std::move(avgs);
    r.residuals.reserve(r.averages.size());
    double s = 0;
    for (const auto& a : r.averages) {
      const double n = norm(a);
      r.residuals.push_back(n);
      s += n * n;
    }
    r.aggregate = std::sqrt(s);
    return r;
  }
};

/// sum_g phi(g)^{-1} * values[g].
inline FScalar g_average(const FiniteSubgroup& G, const RegionMeasures& rm,
                         const Automorphism& phi) {
  require_matching_group(G, phi, "g_average");
  if (rm.group_fingerprint != G.fingerprint || rm.size() != G.order())
    throw std::invalid_argument("g_average: measures were taken for a different group");
  FScalar acc = FScalar::zero(G.algebra);
  for (int g = 0; g < G.order(); ++g)
    acc += G.element(G.inv(phi(g))) * rm.values[static_cast<std::size_t>(g)];
  return acc;
}

/// The Z_m character sum sum_k zeta_m^{-rk} mu(S_k): g_average under the
/// power automorphism g -> g^r of a cyclic group.
inline FScalar zm_average(const FiniteSubgroup& G, const RegionMeasures& rm, int r) {
  return g_average(G, rm, cyclic_automorphism(G, r));
}

/// The subgroup H of a coset decomposition as a group in its own right,
/// listing elements in subgroup-index order (identity stays first).
inline FiniteSubgroup subgroup_as_group(const FiniteSubgroup& G,
                                        const CosetDecomposition& dec) {
  std::vector<FScalar> elems;
  elems.reserve(dec.subgroup.size());
  for (int t : dec.subgroup) elems.push_back(G.element(t));
  std::string label = G.label.empty() ? std::string("H") : ("H<=" + G.label);
  return build_group(G.algebra, std::move(elems), std::move(label));
}

/// Per-coset H-averages: out[l] = sum_t phi_l(h_t)^{-1} * values[g_l * h_t].
/// Each phis[l] must be an automorphism of subgroup_as_group(G, dec).
inline std::vector<FScalar> coset_average(const FiniteSubgroup& G,
                                          const RegionMeasures& rm,
                                          const CosetDecomposition& dec,
                                          const std::vector<Automorphism>& phis) {
  if (rm.group_fingerprint != G.fingerprint || rm.size() != G.order())
    throw std::invalid_argument("coset_average: measures were taken for a different group");
  if (static_cast<int>(phis.size()) != dec.count())
    throw std::invalid_argument("coset_average: need one automorphism per coset");
  const FiniteSubgroup H = subgroup_as_group(G, dec);
  for (const auto& phi : phis) require_matching_group(H, phi, "coset_average");
  std::vector<FScalar> out;
  out.reserve(static_cast<std::size_t>(dec.count()));
  for (int l = 0; l < dec.count(); ++l) {
    FScalar acc = FScalar::zero(G.algebra);
    for (int t = 0; t < dec.subgroup_order(); ++t) {
      const int member = dec.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
      acc += H.element(H.inv(phis[static_cast<std::size_t>(l)](t))) *
             rm.values[static_cast<std::size_t>(member)];
    }
    out.push_back(acc);
  }
  return out;
}

/// Scale-free default tolerance for equipartition checks.
inline double default_check_tolerance(const std::vector<RegionMeasures>& rms) {
  double scale = 0;
  for (const auto& rm : rms) {
    FScalar tot = FScalar::zero(rm.values.empty() ? Algebra::R : rm.values[0].algebra());
    for (const auto& v : rm.values) tot += v;
    scale = std::max(scale, norm(tot));
  }
  return 1e-6 * (1.0 + scale);
}

struct EquipartitionCheck {
  enum class Kind { Full, ModK, OppositePairs, Coset };
  Kind kind = Kind::Full;
  std::vector<double> deviations;
  double tau = 0;
  bool pass = false;  // max deviation <= tau

  double max_deviation() const {
    double m = 0;
    for (double d : deviations) m = std::max(m, d);
    return m;
  }
};

inline const char* check_kind_name(EquipartitionCheck::Kind k) {
  switch (k) {
    case EquipartitionCheck::Kind::Full: return "full";
    case EquipartitionCheck::Kind::ModK: return "mod_k";
    case EquipartitionCheck::Kind::OppositePairs: return "opposite_pairs";
    case EquipartitionCheck::Kind::Coset: return "coset";
  }
  return "?";
}

namespace detail {

inline EquipartitionCheck finish_check(EquipartitionCheck::Kind kind,
                                       std::vector<double> devs, double tau) {
  EquipartitionCheck c;
  c.kind = kind;
  c.deviations = std::move(devs);
  c.tau = tau;
  c.pass = c.max_deviation() <= tau;
  return c;
}

inline void require_real_values(const RegionMeasures& rm, const char* where) {
  for (const auto& v : rm.values)
    for (int k = 1; k < v.dimension(); ++k)
      if (std::abs(v[k]) > 1e-12)
        throw std::invalid_argument(std::string(where) +
                                    ": requires real-valued measures (split F-valued "
                                    "measures into components first)");
}

}  // namespace detail

/// All regions carry 1/|G| of the total: deviations |values[g] - total/|G||
/// over every region of every measure.  Real-valued measures only.
inline EquipartitionCheck check_full_equipartition(const std::vector<RegionMeasures>& rms,
                                                   double tau) {
  std::vector<double> devs;
  for (const auto& rm : rms) {
    detail::require_real_values(rm, "check_full_equipartition");
    if (rm.values.empty()) continue;
    FScalar tot = FScalar::zero(rm.values[0].algebra());
    for (const auto& v : rm.values) tot += v;
    const FScalar share = (1.0 / rm.size()) * tot;
    for (const auto& v : rm.values) devs.push_back(norm(v - share));
  }
  return detail::finish_check(EquipartitionCheck::Kind::Full, std::move(devs), tau);
}

/// Interleaved equality values[i] = values[i+k] (indices mod |G|), the mod-k
/// equipartition pattern of a km-fan.
inline EquipartitionCheck check_mod_k(const std::vector<RegionMeasures>& rms, int k,
                                      double tau) {
  std::vector<double> devs;
  for (const auto& rm : rms) {
    const int km = rm.size();
    if (k < 1 || km % k != 0)
      throw std::invalid_argument("check_mod_k: region count " + std::to_string(km) +
                                  " is not divisible by k = " + std::to_string(k));
    for (int i = 0; i < km; ++i)
      devs.push_back(norm(rm.values[static_cast<std::size_t>(i)] -
                          rm.values[static_cast<std::size_t>((i + k) % km)]));
  }
  return detail::finish_check(EquipartitionCheck::Kind::ModK, std::move(devs), tau);
}

/// Opposite regions carry equal measure: values[g] = values[-g] for all g.
/// Defined when -1 is an element of G.
inline EquipartitionCheck check_opposite_pairs(const FiniteSubgroup& G,
                                               const std::vector<RegionMeasures>& rms,
                                               double tau) {
  const std::vector<int> neg = negation_permutation(G);
  std::vector<double> devs;
  for (const auto& rm : rms) {
    if (rm.size() != G.order() || rm.group_fingerprint != G.fingerprint)
      throw std::invalid_argument("check_opposite_pairs: measures/group mismatch");
    for (int g = 0; g < G.order(); ++g)
      devs.push_back(norm(rm.values[static_cast<std::size_t>(g)] -
                          rm.values[static_cast<std::size_t>(neg[static_cast<std::size_t>(g)])]));
  }
  return detail::finish_check(EquipartitionCheck::Kind::OppositePairs, std::move(devs), tau);
}

/// Vanishing of every per-coset H-average (one deviation per coset per measure).
inline EquipartitionCheck check_coset(const FiniteSubgroup& G,
                                      const std::vector<RegionMeasures>& rms,
                                      const CosetDecomposition& dec,
                                      const std::vector<Automorphism>& phis, double tau) {
  std::vector<double> devs;
  for (const auto& rm : rms)
    for (const auto& avg : coset_average(G, rm, dec, phis)) devs.push_back(norm(avg));
  return detail::finish_check(EquipartitionCheck::Kind::Coset, std::move(devs), tau);
}

}  // namespace equipart
