#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "equipart/solver.hpp"
#include "test_support.hpp"

using namespace equipart;

namespace {

std::vector<Automorphism> ids(const FiniteSubgroup& G, std::size_t k) {
  return std::vector<Automorphism>(k, identity_automorphism(G));
}

PartitionParams unit_params(Algebra a, std::vector<FScalar> entries) {
  return make_params(FVector(a, std::move(entries)));
}

}  // namespace

TEST_CASE("residual at hand-checked parameters", "[solver]") {
  const FiniteSubgroup C4 = cyclic_group(4, Algebra::C);

  SECTION("pole sends all mass to the identity region") {
    const auto dist = testutil::signed_cloud(Algebra::C, 1, 3, 1, 11);
    const PartitionParams pole =
        unit_params(Algebra::C, {FScalar::one(Algebra::C), FScalar::zero(Algebra::C)});
    REQUIRE(pole.at_pole());
    const AverageReport rep = residual(C4, pole, {dist}, ids(C4, 1));
    CHECK(rep.aggregate == Catch::Approx(2.0).margin(1e-12));  // |total|
  }

  SECTION("a full orbit puts one atom per region and the roots cancel") {
    for (int m : {2, 3, 4, 6}) {
      const FiniteSubgroup G = cyclic_group(m, m == 2 ? Algebra::R : Algebra::C);
      const Algebra a = G.algebra;
      const FScalar x0 = a == Algebra::R ? FScalar::real(0.37)
                                         : FScalar::complex(0.3, 0.7);
      const auto dist = testutil::orbit_cloud(G, x0, 1.0);
      const PartitionParams p =
          unit_params(a, {FScalar::zero(a), FScalar::one(a)});
      const AverageReport rep = residual(G, p, {dist}, ids(G, 1));
      CHECK(rep.aggregate <= 1e-15);  // residue of the m-th root sum
      const RegionMeasures rm = measure_regions(dist, p, G);
      for (const auto& v : rm.values) CHECK(v == FScalar::one(a));
    }
  }

  SECTION("input validation") {
    const PartitionParams p =
        unit_params(Algebra::C, {FScalar::zero(Algebra::C), FScalar::one(Algebra::C)});
    CHECK_THROWS_AS(residual(C4, p, {}, {}), std::invalid_argument);
    const auto dist = testutil::signed_cloud(Algebra::C, 1, 3, 1, 3);
    CHECK_THROWS_AS(residual(C4, p, {dist}, ids(C4, 2)), std::invalid_argument);
    const auto wrong = testutil::signed_cloud(Algebra::R, 1, 3, 1, 3);
    CHECK_THROWS_AS(residual(C4, p, {wrong}, ids(C4, 1)), std::invalid_argument);
  }
}

TEST_CASE("residual norms are invariant under the group action", "[solver]") {
  struct Case {
    FiniteSubgroup G;
    int n;
  };
  const std::vector<Case> cases = {{cyclic_group(5, Algebra::C), 2},
                                   {quaternion_group(), 1}};
  for (const auto& c : cases) {
    const Algebra a = c.G.algebra;
    std::vector<MassDistribution> dists;
    for (int i = 0; i < c.n; ++i)
      dists.push_back(testutil::signed_cloud(a, c.n, 6, 2, 100 + static_cast<std::uint64_t>(i)));
    const auto phis = ids(c.G, dists.size());
    int checked = 0;
    for (std::uint64_t t = 0; t < 40; ++t) {
      const PartitionParams p = make_params(testutil::random_unit(a, c.n + 1, 500 + t, 0));
      if (excluded_set_margin(p, c.G) < 1e-6) continue;
      bool near_tie = false;
      for (const auto& d : dists)
        for (const auto& atom : d.atoms())
          if (testutil::tie_gap(fiber_value(atom.x, p), c.G) < 1e-7) near_tie = true;
      if (near_tie) continue;
      const double base = residual(c.G, p, dists, phis).aggregate;
      for (int g = 1; g < c.G.order(); g += 3) {
        const double moved = residual(c.G, act(c.G, g, p), dists, phis).aggregate;
        CHECK(std::abs(moved - base) <= 1e-12 * (1.0 + base));
        ++checked;
      }
    }
    CHECK(checked >= 30);
  }
}

TEST_CASE("planar two-mass bisection", "[solver]") {
  // Two clouds of four unit atoms in the plane; a converged run must split
  // both exactly two against two.
  const FiniteSubgroup C2 = cyclic_group(2, Algebra::R);
  const std::vector<MassDistribution> dists = {
      testutil::signed_cloud(Algebra::R, 2, 4, 0, 21),
      testutil::signed_cloud(Algebra::R, 2, 4, 0, 22)};
  SolveConfig cfg;
  cfg.restarts = 16;
  cfg.max_iters = 600;
  const SolveResult res = solve(C2, dists, ids(C2, 2), cfg);
  REQUIRE(res.converged);
  CHECK(res.report.aggregate <= cfg.tol);
  CHECK(res.margin > cfg.margin_floor);
  CHECK(res.restart_index >= 0);
  for (const auto& d : dists) {
    const RegionMeasures rm = measure_regions(d, res.params, C2);
    CHECK(rm.values[0] == FScalar::real(2.0));
    CHECK(rm.values[1] == FScalar::real(2.0));
    CHECK(rm.boundary_mass == FScalar::zero(Algebra::R));
  }
}

TEST_CASE("solver lands on an exact plateau the oracle can confirm", "[solver]") {
  const FiniteSubgroup C2 = cyclic_group(2, Algebra::R);
  std::vector<Atom> atoms;
  for (double pos : {-1.5, -0.5, 0.5, 1.5})
    atoms.push_back(Atom{FVector(Algebra::R, {FScalar::real(pos)}),
                         FScalar::real(pos == 0.5 ? -1.0 : 1.0)});
  const MassDistribution line =
      MassDistribution::point_cloud(Algebra::R, 1, std::move(atoms));
  SolveConfig cfg;
  cfg.restarts = 8;
  cfg.max_iters = 400;
  const SolveResult res = solve(C2, {line}, ids(C2, 1), cfg);
  REQUIRE(res.converged);
  CHECK(res.report.aggregate == 0.0);

  const OracleResult oc = oracle_grid(C2, {line}, ids(C2, 1), 256);
  CHECK(oc.grid_points == 256);
  CHECK(oc.best_report.aggregate >= res.report.aggregate);
  CHECK(oc.best_report.aggregate == 0.0);
  // u and -u swap the two half-lines, so the signed average changes sign an
  // even, positive number of times around the circle.
  CHECK(oc.sign_changes >= 2);
  CHECK(oc.sign_patterns >= 2);
}

TEST_CASE("thread count never changes the answer", "[solver]") {
  const FiniteSubgroup C3 = cyclic_group(3, Algebra::C);
  const std::vector<MassDistribution> dists = {
      testutil::signed_cloud(Algebra::C, 1, 5, 3, 31)};
  SolveConfig cfg;
  cfg.restarts = 10;
  cfg.max_iters = 500;
  cfg.threads = 1;
  const SolveResult a = solve(C3, dists, ids(C3, 1), cfg);
  cfg.threads = 4;
  const SolveResult b = solve(C3, dists, ids(C3, 1), cfg);
  CHECK(a.converged == b.converged);
  CHECK(a.restart_index == b.restart_index);
  CHECK(a.iterations == b.iterations);
  CHECK(a.report.aggregate == b.report.aggregate);
  const auto ra = a.params.u.to_reals();
  const auto rb = b.params.u.to_reals();
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i] == rb[i]);
}

TEST_CASE("coset solve satisfies the per-coset conditions", "[solver]") {
  const FiniteSubgroup C4 = cyclic_group(4, Algebra::C);
  const CosetDecomposition dec = cosets(C4, {0, 2});
  const FiniteSubgroup H = subgroup_as_group(C4, dec);
  const std::vector<MassDistribution> dists = {
      testutil::signed_cloud(Algebra::C, 1, 6, 2, 41)};
  const std::vector<Automorphism> phis(2, identity_automorphism(H));
  SolveConfig cfg;
  cfg.restarts = 24;
  cfg.max_iters = 800;
  const SolveResult res = solve_coset(C4, dists, dec, phis, cfg);
  REQUIRE(res.converged);
  CHECK(res.report.averages.size() == 2);  // one condition per coset
  CHECK(res.report.aggregate <= cfg.tol);

  const RegionMeasures rm = measure_regions(dists[0], res.params, C4);
  CHECK(check_coset(C4, {rm}, dec, phis, default_check_tolerance({rm})).pass);
  // Integer weights make the plateau exact: opposite sectors carry exactly
  // equal mass.
  CHECK(rm.values[0] == rm.values[2]);
  CHECK(rm.values[1] == rm.values[3]);
}

TEST_CASE("config validation", "[solver]") {
  const FiniteSubgroup C2 = cyclic_group(2, Algebra::R);
  const std::vector<MassDistribution> dists = {
      testutil::signed_cloud(Algebra::R, 1, 2, 0, 51)};
  SolveConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(solve(C2, dists, ids(C2, 1), cfg), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.tol = 1e-13;
  CHECK_THROWS_AS(solve(C2, dists, ids(C2, 1), cfg), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.step = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.margin_floor = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.smoothing = -1.0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.threads = -2;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = SolveConfig{};
  CHECK_THROWS_AS(oracle_grid(C2, dists, ids(C2, 1), 0), std::invalid_argument);
}
