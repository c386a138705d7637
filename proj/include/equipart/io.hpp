#pragma once

// JSON I/O: instance files, partition parameters, solver reports.  All output
// goes through ordered_json with content-only fields, so equal inputs produce
// byte-identical files regardless of thread count or wall clock (timing is
// opt-in and stored as null by default).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "equipart/algebra.hpp"
#include "equipart/averages.hpp"
#include "equipart/groups.hpp"
#include "equipart/measures.hpp"
#include "equipart/partition.hpp"
#include "equipart/solver.hpp"
#include "equipart/version.hpp"

namespace equipart::io {

using json = nlohmann::ordered_json;

/// Input problems distinct from search failures: malformed files, schema
/// violations, invariant-breaking data.  The CLI maps these to exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

inline std::string input_hash_hex(std::string_view bytes) {
  const std::uint64_t h =
      detail::fnv1a64(detail::kFnvOffset, bytes.data(), bytes.size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- scalars and vectors ----------------------------------------------------

inline FScalar scalar_from_json(const json& j, Algebra a) {
  std::vector<double> comps;
  if (j.is_number()) {
    comps.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& c : j) {
      if (!c.is_number()) throw ParseError("scalar components must be numbers");
      comps.push_back(c.get<double>());
    }
  } else {
    throw ParseError("scalar must be a number or an array of components");
  }
  if (static_cast<int>(comps.size()) > dim(a))
    throw ParseError("scalar has " + std::to_string(comps.size()) +
                     " components but algebra " + algebra_name(a) + " has dimension " +
                     std::to_string(dim(a)));
  return FScalar(a, comps);
}

inline json scalar_to_json(const FScalar& s) {
  json arr = json::array();
  for (int k = 0; k < s.dimension(); ++k) arr.push_back(s[k]);
  return arr;
}

inline FVector vector_from_json(const json& j, Algebra a, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("vector must be an array of " + std::to_string(n) + " entries");
  std::vector<FScalar> entries;
  entries.reserve(j.size());
  for (const auto& e : j) entries.push_back(scalar_from_json(e, a));
  return FVector(a, std::move(entries));
}

inline json vector_to_json(const FVector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(scalar_to_json(v[i]));
  return arr;
}

// ---- groups and automorphisms -----------------------------------------------

inline FiniteSubgroup group_from_spec(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ParseError("group spec needs a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "cyclic") {
      if (!j.contains("m")) throw ParseError("cyclic group spec needs \"m\"");
      const int m = j.at("m").get<int>();
      const Algebra a =
          j.contains("algebra") ? algebra_from_name(j.at("algebra").get<std::string>())
                                : Algebra::C;
      return cyclic_group(m, a);
    }
    if (kind == "binary_dihedral") {
      if (!j.contains("m")) throw ParseError("binary_dihedral group spec needs \"m\"");
      return binary_dihedral_group(j.at("m").get<int>());
    }
    if (kind == "T*" || kind == "O*" || kind == "I*")
      return binary_polyhedral_group(kind);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("group spec: ") + e.what());
  }
  throw ParseError("unknown group kind: " + kind);
}

inline Automorphism automorphism_from_spec(const json& j, const FiniteSubgroup& G) {
  if (!j.is_object() || !j.contains("type"))
    throw ParseError("automorphism spec needs a \"type\" field");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "power") {
      if (!j.contains("r")) throw ParseError("power automorphism needs \"r\"");
      return cyclic_automorphism(G, j.at("r").get<int>());
    }
    if (type == "table") {
      if (!j.contains("perm")) throw ParseError("table automorphism needs \"perm\"");
      return validate_automorphism(G, j.at("perm").get<std::vector<int>>());
    }
    if (type == "identity") return identity_automorphism(G);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("automorphism spec: ") + e.what());
  }
  throw ParseError("unknown automorphism type: " + type);
}

// ---- measures ----------------------------------------------------------------

inline MassDistribution measure_from_spec(const json& j, Algebra a, int n) {
  if (!j.is_object() || !j.contains("kind"))
    throw ParseError("measure spec needs a \"kind\" field");
  if (j.contains("algebra") &&
      algebra_from_name(j.at("algebra").get<std::string>()) != a)
    throw ParseError("measure algebra does not match the instance algebra");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "points") {
      if (!j.contains("points") || !j.at("points").is_array())
        throw ParseError("points measure needs a \"points\" array");
      std::vector<Atom> atoms;
      atoms.reserve(j.at("points").size());
      for (const auto& p : j.at("points")) {
        if (!p.contains("x") || !p.contains("w"))
          throw ParseError("each point needs \"x\" and \"w\"");
        atoms.push_back(Atom{vector_from_json(p.at("x"), a, n),
                             scalar_from_json(p.at("w"), a)});
      }
      return MassDistribution::point_cloud(a, n, std::move(atoms));
    }
    if (kind == "density") {
      if (!j.contains("support") || !j.contains("N") || !j.contains("seed"))
        throw ParseError("density measure needs \"support\", \"N\", and \"seed\"");
      const json& sj = j.at("support");
      SupportSpec sup;
      const std::string type = sj.at("type").get<std::string>();
      if (type == "ball") {
        sup.kind = SupportSpec::Kind::Ball;
        sup.center = sj.at("center").get<std::vector<double>>();
        sup.radius = sj.at("radius").get<double>();
      } else if (type == "box") {
        sup.kind = SupportSpec::Kind::Box;
        sup.lo = sj.at("lo").get<std::vector<double>>();
        sup.hi = sj.at("hi").get<std::vector<double>>();
      } else if (type == "annulus") {
        sup.kind = SupportSpec::Kind::Annulus;
        sup.center = sj.at("center").get<std::vector<double>>();
        sup.r_inner = sj.at("r_inner").get<double>();
        sup.r_outer = sj.at("r_outer").get<double>();
      } else {
        throw ParseError("unknown support type: " + type);
      }
      return MassDistribution::sampled_density(a, n, sup, j.at("N").get<int>(),
                                               j.at("seed").get<std::uint64_t>());
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("measure spec: ") + e.what());
  }
  throw ParseError("unknown measure kind: " + kind);
}

// ---- config -------------------------------------------------------------------

inline SolveConfig config_from_json(const json& j, bool* tol_explicit = nullptr) {
  SolveConfig c;
  if (tol_explicit) *tol_explicit = false;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ParseError("config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "restarts") c.restarts = value.get<int>();
    else if (key == "max_iters") c.max_iters = value.get<int>();
    else if (key == "step") c.step = value.get<double>();
    else if (key == "tol") {
      c.tol = value.get<double>();
      if (tol_explicit) *tol_explicit = true;
    }
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "margin_floor") c.margin_floor = value.get<double>();
    else if (key == "smoothing") c.smoothing = value.get<double>();
    else if (key == "threads") c.threads = value.get<int>();
    else throw ParseError("unknown config key: " + key);
  }
  try {
    validate_config(c);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return c;
}

// ---- instances -----------------------------------------------------------------

struct Instance {
  Algebra algebra = Algebra::R;
  int n = 1;
  FiniteSubgroup group;
  std::vector<MassDistribution> measures;
  std::vector<Automorphism> automorphisms;  // plain mode, one per measure
  bool has_coset = false;
  CosetDecomposition coset;
  FiniteSubgroup subgroup;                  // materialized H when has_coset
  std::vector<Automorphism> coset_phis;     // one per coset
  SolveConfig config;
  bool tol_explicit = false;
  std::string raw;                          // original bytes, hashed into reports
};

inline Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  try {
    Instance inst;
    inst.raw = text;
    if (!j.contains("algebra")) throw ParseError("instance needs \"algebra\"");
    inst.algebra = algebra_from_name(j.at("algebra").get<std::string>());
    if (!j.contains("n")) throw ParseError("instance needs ambient dimension \"n\"");
    inst.n = j.at("n").get<int>();
    if (inst.n < 1) throw ParseError("ambient dimension n must be >= 1");
    if (!j.contains("group")) throw ParseError("instance needs \"group\"");
    inst.group = group_from_spec(j.at("group"));
    if (inst.group.algebra != inst.algebra)
      throw ParseError("group algebra does not match the instance algebra");

    if (!j.contains("measures") || !j.at("measures").is_array() ||
        j.at("measures").empty())
      throw ParseError("instance needs a nonempty \"measures\" array");
    for (const auto& mj : j.at("measures"))
      inst.measures.push_back(measure_from_spec(mj, inst.algebra, inst.n));

    if (j.contains("coset")) {
      inst.has_coset = true;
      const json& cj = j.at("coset");
      if (!cj.contains("subgroup"))
        throw ParseError("coset spec needs \"subgroup\" element indices");
      try {
        inst.coset = cosets(inst.group, cj.at("subgroup").get<std::vector<int>>());
        inst.subgroup = subgroup_as_group(inst.group, inst.coset);
      } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("coset spec: ") + e.what());
      }
      if (cj.contains("automorphisms")) {
        for (const auto& aj : cj.at("automorphisms"))
          inst.coset_phis.push_back(automorphism_from_spec(aj, inst.subgroup));
        if (static_cast<int>(inst.coset_phis.size()) != inst.coset.count())
          throw ParseError("coset spec needs one automorphism per coset (" +
                           std::to_string(inst.coset.count()) + ")");
      } else {
        for (int l = 0; l < inst.coset.count(); ++l)
          inst.coset_phis.push_back(identity_automorphism(inst.subgroup));
      }
    } else {
      if (static_cast<int>(inst.measures.size()) != inst.n)
        throw ParseError("instance needs exactly n = " + std::to_string(inst.n) +
                         " measures (got " + std::to_string(inst.measures.size()) + ")");
      if (j.contains("automorphisms")) {
        for (const auto& aj : j.at("automorphisms"))
          inst.automorphisms.push_back(automorphism_from_spec(aj, inst.group));
        if (inst.automorphisms.size() != inst.measures.size())
          throw ParseError("need one automorphism per measure");
      } else {
        for (std::size_t i = 0; i < inst.measures.size(); ++i)
          inst.automorphisms.push_back(identity_automorphism(inst.group));
      }
    }

    inst.config = config_from_json(j.contains("config") ? j.at("config") : json(),
                                   &inst.tol_explicit);
    if (!inst.tol_explicit) {
      // Sampled densities cannot beat Monte Carlo error; widen the default target.
      int min_n = 0;
      for (const auto& m : inst.measures)
        if (m.is_sampled())
          min_n = (min_n == 0) ? m.sample_count() : std::min(min_n, m.sample_count());
      if (min_n > 0)
        inst.config.tol = std::max(inst.config.tol, 3.0 / std::sqrt(double(min_n)));
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

// ---- partition params ------------------------------------------------------------

inline PartitionParams params_from_json(const json& j, Algebra a, int n) {
  const json* uj = nullptr;
  if (j.contains("u")) {
    uj = &j.at("u");
  } else if (j.contains("params") && j.at("params").contains("u")) {
    uj = &j.at("params").at("u");
  } else if (j.contains("solve") && j.at("solve").contains("params") &&
             j.at("solve").at("params").contains("u")) {
    uj = &j.at("solve").at("params").at("u");
  } else {
    throw ParseError("no \"u\" found in params file (accepts params or report files)");
  }
  if (j.contains("algebra") &&
      algebra_from_name(j.at("algebra").get<std::string>()) != a)
    throw ParseError("params algebra does not match the instance");
  FVector u = vector_from_json(*uj, a, n + 1);
  try {
    return normalized_params(u);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("params: ") + e.what());
  }
}

inline PartitionParams load_params(const std::string& path, Algebra a, int n) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params JSON: ") + e.what());
  }
  return params_from_json(j, a, n);
}

inline json params_to_json(const PartitionParams& p) {
  json j;
  j["algebra"] = algebra_name(p.algebra());
  j["u"] = vector_to_json(p.u);
  return j;
}

// ---- reports ------------------------------------------------------------------

inline json check_to_json(const EquipartitionCheck& c) {
  json j;
  j["kind"] = check_kind_name(c.kind);
  j["pass"] = c.pass;
  j["tau"] = c.tau;
  j["max_deviation"] = c.max_deviation();
  j["deviations"] = c.deviations;
  return j;
}

inline json report_to_json(const Instance& inst, const SolveResult& result,
                           const std::vector<EquipartitionCheck>& checks,
                           bool emit_timing = false) {
  json j;
  j["tool"] = "equipart";
  j["version"] = kVersion;
  j["input_hash"] = input_hash_hex(inst.raw);
  j["algebra"] = algebra_name(inst.algebra);
  j["group"] = {{"label", inst.group.label}, {"order", inst.group.order()}};
  json solve;
  solve["converged"] = result.converged;
  solve["residual"] = result.report.aggregate;
  solve["residuals"] = result.report.residuals;
  json avgs = json::array();
  for (const auto& a : result.report.averages) avgs.push_back(scalar_to_json(a));
  solve["averages"] = avgs;
  solve["params"] = params_to_json(result.params);
  solve["margin"] = std::isfinite(result.margin) ? result.margin : 1e300;
  solve["iterations"] = result.iterations;
  solve["restart_index"] = result.restart_index;
  j["solve"] = solve;
  json cj = json::array();
  for (const auto& c : checks) cj.push_back(check_to_json(c));
  j["checks"] = cj;
  j["timing"] = emit_timing ? json(result.wall_time_sec) : json();
  return j;
}

}  // namespace equipart::io
