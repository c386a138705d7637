#pragma once

// Verification driver: given an instance and candidate parameters, recompute
// the residual and run every equipartition check that the instance's solved
// conditions actually imply.  Applicability is deliberately conservative so
// that a converged solve always verifies cleanly:
//
//   * coset instances        -> coset check (the solved conditions themselves)
//   * coset with H = {1,-1}  -> opposite-pairs equality
//   * cyclic G of prime order p, real measures, and characters r = 1..(p-1)/2
//     all applied to each measure -> full equipartition (DFT inversion)
//   * coset, cyclic G, prime |H|, real measures, full characters per measure
//     -> mod-k equality with k = number of cosets
//
// Checks that the conditions do not imply are skipped, not failed.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "equipart/averages.hpp"
#include "equipart/io.hpp"
#include "equipart/measures.hpp"
#include "equipart/partition.hpp"
#include "equipart/solver.hpp"

namespace equipart {

namespace detail {

inline bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

inline bool weights_real(const MassDistribution& m) {
  for (const auto& atom : m.atoms())
    for (int k = 1; k < dim(m.algebra()); ++k)
      if (atom.w[k] != 0.0) return false;
  return true;
}

inline bool same_atoms(const MassDistribution& x, const MassDistribution& y) {
  if (x.atoms().size() != y.atoms().size() || x.ambient_dim() != y.ambient_dim())
    return false;
  for (std::size_t i = 0; i < x.atoms().size(); ++i) {
    const Atom& a = x.atoms()[i];
    const Atom& b = y.atoms()[i];
    if (!(a.w == b.w)) return false;
    for (int j = 0; j < a.x.size(); ++j)
      if (!(a.x[j] == b.x[j])) return false;
  }
  return true;
}

/// Exponent of a power automorphism on a canonical cyclic group (the image of
/// the generator, index 1).
inline int power_exponent(const Automorphism& phi) { return phi(1); }

/// Character exponents folded into 1..m/2 (r and m-r are conjugate on real
/// measures), grouped by value-equal measures; index i maps to its class.
inline std::vector<std::set<int>> character_coverage(
    const std::vector<MassDistribution>& measures, const std::vector<int>& exponents,
    int m, std::vector<int>* class_of) {
  std::vector<int> cls(measures.size(), -1);
  int n_classes = 0;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (cls[j] >= 0 && same_atoms(measures[i], measures[j])) {
        cls[i] = cls[j];
        break;
      }
    if (cls[i] < 0) cls[i] = n_classes++;
  }
  std::vector<std::set<int>> cover(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const int r = ((exponents[i] % m) + m) % m;
    cover[static_cast<std::size_t>(cls[i])].insert(std::min(r, m - r));
  }
  if (class_of) *class_of = cls;
  return cover;
}

inline bool covers_all_characters(const std::vector<std::set<int>>& cover, int p) {
  const int need_up_to = (p == 2) ? 1 : (p - 1) / 2;
  for (const auto& s : cover)
    for (int r = 1; r <= need_up_to; ++r)
      if (!s.count(r)) return false;
  return true;
}

}  // namespace detail

struct VerifyOutcome {
  AverageReport residual_report;
  std::vector<RegionMeasures> region_measures;  // one per instance measure
  std::vector<EquipartitionCheck> checks;
  double tau = 0;
  bool pass = false;  // residual <= tau and every applicable check passes
};

inline VerifyOutcome run_verification(const io::Instance& inst,
                                      const PartitionParams& params,
                                      double tau_override = 0.0) {
  VerifyOutcome out;
  for (const auto& m : inst.measures)
    out.region_measures.push_back(measure_regions(m, params, inst.group));
  out.residual_report =
      inst.has_coset
          ? coset_residual(inst.group, params, inst.measures, inst.coset, inst.coset_phis)
          : residual(inst.group, params, inst.measures, inst.automorphisms);
  if (tau_override > 0) {
    out.tau = tau_override;
  } else {
    out.tau = default_check_tolerance(out.region_measures);
    // Sampled densities cannot beat Monte Carlo error; widen like the solve tol.
    int min_n = 0;
    for (const auto& m : inst.measures)
      if (m.is_sampled())
        min_n = (min_n == 0) ? m.sample_count() : std::min(min_n, m.sample_count());
    if (min_n > 0) out.tau = std::max(out.tau, 3.0 / std::sqrt(double(min_n)));
  }

  const bool cyclic = is_canonical_cyclic(inst.group);
  bool all_real = true;
  for (const auto& m : inst.measures) all_real = all_real && detail::weights_real(m);

  if (inst.has_coset) {
    out.checks.push_back(check_coset(inst.group, out.region_measures, inst.coset,
                                     inst.coset_phis, out.tau));
    if (inst.coset.subgroup_order() == 2 &&
        approx_equal(inst.group.element(inst.coset.subgroup[1]),
                     -FScalar::one(inst.algebra), kGroupMatchTol))
      out.checks.push_back(
          check_opposite_pairs(inst.group, out.region_measures, out.tau));
    const int m = inst.coset.subgroup_order();
    if (cyclic && all_real && detail::is_prime(m)) {
      // Per-coset exponents must agree within each listing for the interleaved
      // fan reading; listings then contribute one character each.
      bool uniform = true;
      std::vector<int> exps(inst.measures.size(), 0);
      int r0 = detail::power_exponent(inst.coset_phis[0]);
      for (const auto& phi : inst.coset_phis)
        uniform = uniform && detail::power_exponent(phi) == r0;
      if (m == 2) r0 = 1;  // C_2's only automorphism is the identity
      std::fill(exps.begin(), exps.end(), r0);
      if (uniform &&
          detail::covers_all_characters(
              detail::character_coverage(inst.measures, exps, m, nullptr), m))
        out.checks.push_back(
            check_mod_k(out.region_measures, inst.coset.count(), out.tau));
    }
  } else if (cyclic && all_real && detail::is_prime(inst.group.order())) {
    std::vector<int> exps;
    exps.reserve(inst.automorphisms.size());
    for (const auto& phi : inst.automorphisms)
      exps.push_back(detail::power_exponent(phi));
    if (detail::covers_all_characters(
            detail::character_coverage(inst.measures, exps, inst.group.order(), nullptr),
            inst.group.order()))
      out.checks.push_back(check_full_equipartition(out.region_measures, out.tau));
  }

  out.pass = out.residual_report.aggregate <= out.tau;
  for (const auto& c : out.checks) out.pass = out.pass && c.pass;
  return out;
}

}  // namespace equipart
