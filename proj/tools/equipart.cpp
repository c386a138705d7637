// equipart: solve / verify / oracle / plot / groups front end.
//
// Exit codes: 0 success (solve converged, checks pass), 1 search or check
// failure, 2 input problems (malformed files, shape errors, unsupported
// dimensions).  Artifacts (JSON, SVG) go to --out or stdout; progress and
// summaries go to stderr so piped output stays machine-readable.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "equipart/io.hpp"
#include "equipart/solver.hpp"
#include "equipart/svg.hpp"
#include "equipart/verify.hpp"
#include "equipart/version.hpp"

namespace {

using equipart::io::json;

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

void emit(const std::string& text, const std::string& out_path, const char* what) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    equipart::io::write_file(out_path, text);
    std::cerr << "wrote " << what << " to " << out_path << "\n";
  }
}

// --threads beats the instance config, which beats EQUIPART_THREADS.
void apply_thread_fallback(equipart::SolveConfig& cfg, bool flag_given, int flag_value) {
  if (flag_given) {
    cfg.threads = flag_value;
    return;
  }
  if (cfg.threads > 0) return;
  if (const char* env = std::getenv("EQUIPART_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw equipart::io::ParseError(std::string("EQUIPART_THREADS is not a valid "
                                                 "thread count: ") + env);
    cfg.threads = static_cast<int>(v);
  }
}

equipart::SolveResult run_solve(const equipart::io::Instance& inst) {
  if (inst.has_coset)
    return equipart::solve_coset(inst.group, inst.measures, inst.coset, inst.coset_phis,
                                 inst.config);
  return equipart::solve(inst.group, inst.measures, inst.automorphisms, inst.config);
}

void print_check_line(std::ostream& os, const equipart::EquipartitionCheck& c) {
  os << "check " << equipart::check_kind_name(c.kind) << ": "
     << (c.pass ? "PASS" : "FAIL") << "  max deviation " << fmt("%.3e", c.max_deviation())
     << "  tau " << fmt("%.3e", c.tau) << "\n";
}

void print_deviation_table(std::ostream& os, const equipart::VerifyOutcome& v) {
  os << "residual: aggregate " << fmt("%.6e", v.residual_report.aggregate) << "  tau "
     << fmt("%.3e", v.tau) << "  "
     << (v.residual_report.aggregate <= v.tau ? "PASS" : "FAIL") << "\n";
  for (std::size_t i = 0; i < v.residual_report.residuals.size(); ++i)
    os << "  condition " << i << ": " << fmt("%.6e", v.residual_report.residuals[i])
       << "\n";
  for (const auto& c : v.checks) {
    print_check_line(os, c);
    for (std::size_t i = 0; i < c.deviations.size(); ++i)
      os << "  " << i << ": " << fmt("%.6e", c.deviations[i]) << "\n";
  }
}

// Forced check names: full, opposite_pairs, mod_k:<k>.
equipart::EquipartitionCheck run_forced_check(const equipart::io::Instance& inst,
                                              const equipart::VerifyOutcome& v,
                                              const std::string& name) {
  try {
    if (name == "full")
      return equipart::check_full_equipartition(v.region_measures, v.tau);
    if (name == "opposite_pairs")
      return equipart::check_opposite_pairs(inst.group, v.region_measures, v.tau);
    if (name.rfind("mod_k:", 0) == 0) {
      const int k = std::stoi(name.substr(6));
      return equipart::check_mod_k(v.region_measures, k, v.tau);
    }
  } catch (const std::invalid_argument& e) {
    throw equipart::io::ParseError(std::string("--check ") + name + ": " + e.what());
  } catch (const std::logic_error& e) {  // stoi failures included
    throw equipart::io::ParseError(std::string("--check ") + name + ": " + e.what());
  }
  throw equipart::io::ParseError("unknown check name: " + name +
                                 " (expected full, opposite_pairs, or mod_k:<k>)");
}

json oracle_to_json(const equipart::OracleResult& o) {
  json j;
  j["grid_points"] = o.grid_points;
  j["best_residual"] = o.best_report.aggregate;
  j["best_residuals"] = o.best_report.residuals;
  j["best_params"] = equipart::io::params_to_json(o.best_params);
  j["sign_changes"] = o.sign_changes;
  j["sign_patterns"] = o.sign_patterns;
  return j;
}

json group_to_json(const equipart::FiniteSubgroup& G) {
  json j;
  j["label"] = G.label;
  j["algebra"] = equipart::algebra_name(G.algebra);
  j["order"] = G.order();
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(G.fingerprint));
  j["fingerprint"] = fp;
  json elems = json::array();
  for (int g = 0; g < G.order(); ++g)
    elems.push_back(equipart::io::scalar_to_json(G.element(g)));
  j["elements"] = elems;
  j["cayley"] = G.cayley;
  j["inverses"] = G.inverses;
  return j;
}

equipart::FiniteSubgroup group_by_name(const std::string& name, const std::string& alg) {
  using namespace equipart;
  const Algebra a = alg.empty() ? Algebra::C : algebra_from_name(alg);
  try {
    if (name == "Q8" || name == "Q_8") return quaternion_group();
    if (name == "T*" || name == "O*" || name == "I*") return binary_polyhedral_group(name);
    if (name.rfind("C_", 0) == 0) return cyclic_group(std::stoi(name.substr(2)), a);
    if (name.rfind("D*_", 0) == 0) return binary_dihedral_group(std::stoi(name.substr(3)));
  } catch (const std::invalid_argument& e) {
    throw io::ParseError(std::string("group ") + name + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw io::ParseError(std::string("group ") + name + ": " + e.what());
  }
  throw io::ParseError("unknown group name: " + name +
                       " (expected C_<m>, D*_<m>, T*, O*, I*, or Q8)");
}

void print_group_table(std::ostream& os, const equipart::FiniteSubgroup& G,
                       bool force_table) {
  os << G.label << "  algebra " << equipart::algebra_name(G.algebra) << "  order "
     << G.order() << "\n";
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(G.fingerprint));
  os << "fingerprint " << fp << "\n\nelements:\n";
  for (int g = 0; g < G.order(); ++g) {
    const equipart::FScalar e = G.element(g);
    os << "  [" << g << "]";
    for (int k = 0; k < e.dimension(); ++k) os << " " << fmt("%+.6f", e[k]);
    os << "\n";
  }
  if (G.order() <= 24 || force_table) {
    os << "\ncayley (row * column):\n";
    for (int p = 0; p < G.order(); ++p) {
      os << " ";
      for (int q = 0; q < G.order(); ++q) {
        char cell[8];
        std::snprintf(cell, sizeof cell, " %3d", G.mul(p, q));
        os << cell;
      }
      os << "\n";
    }
  } else {
    os << "\n(cayley table suppressed for order > 24; pass --table to print it)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equivariant Voronoi equipartition toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", equipart::kVersion);

  std::string instance_path, params_path, out_path;
  double tol = 0, tau = 0;
  int restarts = 0, threads = 0;
  long long resolution = 16384;
  std::uint64_t seed = 0;
  bool emit_timing = false, as_json = false, force_table = false;
  std::vector<std::string> forced_checks;
  std::string group_name, group_algebra;

  CLI::App* solve = app.add_subcommand("solve", "search for equipartition parameters");
  solve->add_option("instance", instance_path, "instance JSON path")->required();
  solve->add_option("-o,--out", out_path, "report path (default: stdout)");
  auto* tol_opt = solve->add_option("--tol", tol, "residual target");
  auto* restarts_opt = solve->add_option("--restarts", restarts, "multistart count");
  auto* seed_opt = solve->add_option("--seed", seed, "restart RNG seed");
  auto* threads_opt = solve->add_option("--threads", threads,
                                        "worker threads (0 = hardware)");
  solve->add_flag("--emit-timing", emit_timing,
                  "record wall time in the report (breaks byte-reproducibility)");

  CLI::App* verify = app.add_subcommand("verify", "recompute residuals and checks");
  verify->add_option("instance", instance_path, "instance JSON path")->required();
  verify->add_option("params", params_path, "params or report JSON path")->required();
  verify->add_option("-o,--out", out_path, "verification JSON path");
  verify->add_option("--tau", tau, "check tolerance override");
  verify->add_option("--check", forced_checks,
                     "extra checks: full, opposite_pairs, mod_k:<k>");

  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive residual grid scan");
  oracle->add_option("instance", instance_path, "instance JSON path")->required();
  oracle->add_option("-o,--out", out_path, "oracle JSON path (default: stdout)");
  oracle->add_option("--resolution", resolution, "approximate grid size");

  CLI::App* plot = app.add_subcommand("plot", "render a planar instance to SVG");
  plot->add_option("instance", instance_path, "instance JSON path")->required();
  plot->add_option("params", params_path, "params or report JSON path")->required();
  plot->add_option("-o,--out", out_path, "SVG path (default: stdout)");

  CLI::App* groups = app.add_subcommand("groups", "print a group table");
  groups->add_option("name", group_name, "C_<m>, D*_<m>, T*, O*, I*, Q8")->required();
  groups->add_option("--algebra", group_algebra, "algebra for cyclic groups (R, C, H)");
  groups->add_flag("--table", force_table, "print the Cayley table regardless of order");
  groups->add_flag("--json", as_json, "emit machine-readable JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      equipart::io::Instance inst = equipart::io::load_instance(instance_path);
      if (tol_opt->count()) {
        inst.config.tol = tol;
        inst.tol_explicit = true;
      }
      if (restarts_opt->count()) inst.config.restarts = restarts;
      if (seed_opt->count()) inst.config.seed = seed;
      apply_thread_fallback(inst.config, threads_opt->count() > 0, threads);
      equipart::validate_config(inst.config);

      const equipart::SolveResult result = run_solve(inst);
      const equipart::VerifyOutcome v = equipart::run_verification(inst, result.params);
      emit(equipart::io::report_to_json(inst, result, v.checks, emit_timing).dump(2),
           out_path, "report");
      std::cerr << "solve " << inst.group.label << " on " << algebra_name(inst.algebra)
                << "^" << inst.n << ": " << (result.converged ? "converged" : "FAILED")
                << "  residual " << fmt("%.6e", result.report.aggregate) << "  margin "
                << fmt("%.3e", result.margin) << "  restart " << result.restart_index
                << "  evals " << result.iterations << "\n";
      for (const auto& c : v.checks) print_check_line(std::cerr, c);
      return result.converged ? 0 : 1;
    }

    if (verify->parsed()) {
      const equipart::io::Instance inst = equipart::io::load_instance(instance_path);
      const equipart::PartitionParams params =
          equipart::io::load_params(params_path, inst.algebra, inst.n);
      equipart::VerifyOutcome v = equipart::run_verification(inst, params, tau);
      for (const auto& name : forced_checks) {
        v.checks.push_back(run_forced_check(inst, v, name));
        v.pass = v.pass && v.checks.back().pass;
      }
      print_deviation_table(std::cout, v);
      if (!out_path.empty()) {
        json j;
        j["input_hash"] = equipart::io::input_hash_hex(inst.raw);
        j["params"] = equipart::io::params_to_json(params);
        j["residual"] = v.residual_report.aggregate;
        j["residuals"] = v.residual_report.residuals;
        j["tau"] = v.tau;
        j["pass"] = v.pass;
        json cj = json::array();
        for (const auto& c : v.checks) cj.push_back(equipart::io::check_to_json(c));
        j["checks"] = cj;
        equipart::io::write_file(out_path, j.dump(2));
        std::cerr << "wrote verification to " << out_path << "\n";
      }
      std::cerr << (v.pass ? "verify: PASS" : "verify: FAIL") << "\n";
      return v.pass ? 0 : 1;
    }

    if (oracle->parsed()) {
      const equipart::io::Instance inst = equipart::io::load_instance(instance_path);
      const equipart::OracleResult o =
          inst.has_coset
              ? equipart::oracle_grid_coset(inst.group, inst.measures, inst.coset,
                                            inst.coset_phis, resolution)
              : equipart::oracle_grid(inst.group, inst.measures, inst.automorphisms,
                                      resolution);
      emit(oracle_to_json(o).dump(2), out_path, "oracle scan");
      std::cerr << "oracle: " << o.grid_points << " grid points, best residual "
                << fmt("%.6e", o.best_report.aggregate) << ", " << o.sign_changes
                << " sign changes, " << o.sign_patterns << " sign patterns\n";
      return 0;
    }

    if (plot->parsed()) {
      const equipart::io::Instance inst = equipart::io::load_instance(instance_path);
      const equipart::PartitionParams params =
          equipart::io::load_params(params_path, inst.algebra, inst.n);
      emit(equipart::svg::render_plot_svg(inst.group, inst.measures, params), out_path,
           "plot");
      return 0;
    }

    if (groups->parsed()) {
      const equipart::FiniteSubgroup G = group_by_name(group_name, group_algebra);
      if (as_json)
        emit(group_to_json(G).dump(2), out_path, "group table");
      else
        print_group_table(std::cout, G, force_table);
      return 0;
    }
  } catch (const equipart::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
