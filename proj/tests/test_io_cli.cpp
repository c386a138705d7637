#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "equipart/io.hpp"
#include "equipart/verify.hpp"

using namespace equipart;
using io::json;
namespace fs = std::filesystem;

#ifndef EQUIPART_CLI_PATH
#define EQUIPART_CLI_PATH ""
#endif

namespace {

constexpr const char* kCliPath = EQUIPART_CLI_PATH;

// Four unit atoms on a line, one negative; every prefix cut that balances the
// signed counts is a wide parameter plateau, so solves finish instantly.
const char* kLineInstance = R"({
  "algebra": "R",
  "n": 1,
  "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
  "measures": [{"kind": "points", "points": [
    {"x": [-1.5], "w": 1},
    {"x": [-0.5], "w": 1},
    {"x": [0.5],  "w": -1},
    {"x": [1.5],  "w": 1}
  ]}],
  "config": {"restarts": 8, "max_iters": 400}
})";

const char* kFanInstance = R"({
  "algebra": "C",
  "n": 1,
  "group": {"kind": "cyclic", "m": 4},
  "measures": [{"kind": "points", "points": [
    {"x": [[0.9, 0.1]],   "w": 1},
    {"x": [[-0.2, 0.8]],  "w": 1},
    {"x": [[-0.7, -0.3]], "w": 1},
    {"x": [[0.4, -0.6]],  "w": 1}
  ]}]
})";

const char* kQuatInstance = R"({
  "algebra": "H",
  "n": 1,
  "group": {"kind": "binary_dihedral", "m": 2},
  "measures": [{"kind": "points", "points": [
    {"x": [[0.3, 0.1, 0.0, 0.2]],  "w": 1},
    {"x": [[-0.5, 0.2, 0.4, 0.0]], "w": 1}
  ]}]
})";

struct CliOut {
  int code = -1;
  std::string text;
};

CliOut run_cli(const std::string& args) {
  const std::string cmd = std::string(kCliPath) + " " + args + " 2>&1";
  CliOut r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.text.append(buf, got);
  const int status = pclose(p);
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  return r;
}

const fs::path& work_dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "equipart_cli_tests";
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string put(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  io::write_file(p.string(), text);
  return p.string();
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

bool has(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("instance parsing", "[io]") {
  const io::Instance inst = io::parse_instance(kLineInstance);
  CHECK(inst.algebra == Algebra::R);
  CHECK(inst.n == 1);
  CHECK(inst.group.order() == 2);
  CHECK(inst.group.label == "C_2");
  CHECK(inst.measures.size() == 1);
  CHECK(inst.automorphisms.size() == 1);
  CHECK_FALSE(inst.has_coset);
  CHECK(inst.config.restarts == 8);
  CHECK(inst.config.tol == 1e-8);
  CHECK_FALSE(inst.tol_explicit);
  CHECK(inst.raw == kLineInstance);
}

TEST_CASE("coset instance parsing", "[io]") {
  const std::string text = R"({
    "algebra": "C", "n": 1,
    "group": {"kind": "cyclic", "m": 4},
    "coset": {"subgroup": [0, 2]},
    "measures": [{"kind": "points", "points": [{"x": [[1.0, 0.0]], "w": 1}]}]
  })";
  const io::Instance inst = io::parse_instance(text);
  CHECK(inst.has_coset);
  CHECK(inst.coset.count() == 2);
  CHECK(inst.subgroup.order() == 2);
  REQUIRE(inst.coset_phis.size() == 2);  // identity filled in per coset
  CHECK(inst.coset_phis[0](0) == 0);
  CHECK(inst.coset_phis[0](1) == 1);

  // Explicit automorphisms are validated against H, one per coset.
  const std::string explicit_phis = R"({
    "algebra": "C", "n": 1,
    "group": {"kind": "cyclic", "m": 4},
    "coset": {"subgroup": [0, 2],
              "automorphisms": [{"type": "identity"}, {"type": "power", "r": 1}]},
    "measures": [{"kind": "points", "points": [{"x": [[1.0, 0.0]], "w": 1}]}]
  })";
  CHECK(io::parse_instance(explicit_phis).coset_phis.size() == 2);
}

TEST_CASE("instance shape errors", "[io]") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(io::parse_instance(text), io::ParseError);
  };
  bad("{ nope");
  bad(R"({"n": 1})");  // missing algebra
  bad(R"({"algebra": "R", "n": 0, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": [{"kind": "points", "points": [{"x": [1], "w": 1}]}]})");
  bad(R"({"algebra": "C", "n": 1, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": [{"kind": "points", "points": [{"x": [[1,0]], "w": 1}]}]})");
  bad(R"({"algebra": "R", "n": 1, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": []})");
  // plain mode needs exactly n measures
  bad(R"({"algebra": "R", "n": 2, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": [{"kind": "points", "points": [{"x": [1, 0], "w": 1}]}]})");
  bad(R"({"algebra": "R", "n": 1, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": [{"kind": "points", "points": [{"w": 1}]}]})");
  bad(R"({"algebra": "R", "n": 1, "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
          "measures": [{"kind": "points", "points": [{"x": [1], "w": 1}]}],
          "config": {"restartz": 4}})");
  bad(R"({"algebra": "R", "n": 1, "group": {"kind": "wat"},
          "measures": [{"kind": "points", "points": [{"x": [1], "w": 1}]}]})");
  bad(R"({"algebra": "C", "n": 1, "group": {"kind": "cyclic", "m": 4},
          "coset": {"subgroup": [0, 1, 2]},
          "measures": [{"kind": "points", "points": [{"x": [[1,0]], "w": 1}]}]})");
  bad(R"({"algebra": "C", "n": 1, "group": {"kind": "cyclic", "m": 4},
          "coset": {"subgroup": [0, 2], "automorphisms": [{"type": "identity"}]},
          "measures": [{"kind": "points", "points": [{"x": [[1,0]], "w": 1}]}]})");
}

TEST_CASE("sampled densities widen an implicit tolerance", "[io]") {
  const std::string text = R"({
    "algebra": "R", "n": 1,
    "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
    "measures": [{"kind": "density", "N": 2500, "seed": 5,
                  "support": {"type": "box", "lo": [-1], "hi": [1]}}]
  })";
  CHECK(io::parse_instance(text).config.tol == Catch::Approx(3.0 / 50.0));

  const std::string pinned = R"({
    "algebra": "R", "n": 1,
    "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
    "measures": [{"kind": "density", "N": 2500, "seed": 5,
                  "support": {"type": "box", "lo": [-1], "hi": [1]}}],
    "config": {"tol": 1e-3}
  })";
  CHECK(io::parse_instance(pinned).config.tol == 1e-3);
}

TEST_CASE("a converged sampled-density solve verifies cleanly", "[io]") {
  const std::string text = R"({
    "algebra": "C", "n": 1,
    "group": {"kind": "cyclic", "m": 3},
    "measures": [{"kind": "density", "N": 2500, "seed": 12,
                  "support": {"type": "ball", "center": [0.2, -0.1], "radius": 1.0}}],
    "automorphisms": [{"type": "power", "r": 1}],
    "config": {"restarts": 8, "max_iters": 600}
  })";
  const io::Instance inst = io::parse_instance(text);
  const SolveResult res = solve(inst.group, inst.measures, inst.automorphisms, inst.config);
  REQUIRE(res.converged);

  // The default check tolerance must sit on the same Monte Carlo floor as the
  // solve tolerance, or converged density solves would flunk their own checks.
  const VerifyOutcome v = run_verification(inst, res.params);
  CHECK(v.tau == 3.0 / 50.0);
  CHECK(v.pass);
  REQUIRE_FALSE(v.checks.empty());
  for (const auto& c : v.checks) CHECK(c.pass);
}

TEST_CASE("params files", "[io]") {
  const json direct = json::parse(R"({"u": [3.0, 4.0]})");
  const PartitionParams p = io::params_from_json(direct, Algebra::R, 1);
  CHECK(p.u[0].real_part() == Catch::Approx(0.6));
  CHECK(p.u[1].real_part() == Catch::Approx(0.8));

  const json wrapped = json::parse(R"({"params": {"u": [3.0, 4.0]}})");
  const json report = json::parse(R"({"solve": {"params": {"u": [3.0, 4.0]}}})");
  CHECK(io::params_from_json(wrapped, Algebra::R, 1).u[0] == p.u[0]);
  CHECK(io::params_from_json(report, Algebra::R, 1).u[0] == p.u[0]);

  CHECK_THROWS_AS(io::params_from_json(json::parse(R"({"v": [1, 0]})"), Algebra::R, 1),
                  io::ParseError);
  CHECK_THROWS_AS(io::params_from_json(json::parse(R"({"u": [1, 0, 0]})"), Algebra::R, 1),
                  io::ParseError);
  CHECK_THROWS_AS(
      io::params_from_json(json::parse(R"({"algebra": "C", "u": [1, 0]})"), Algebra::R, 1),
      io::ParseError);
  CHECK_THROWS_AS(io::params_from_json(json::parse(R"({"u": [0, 0]})"), Algebra::R, 1),
                  io::ParseError);  // zero vector cannot be normalized

  // Emit and re-read a complex parameter vector.
  const PartitionParams q = make_params(
      FVector(Algebra::C, {FScalar::complex(0.0, 0.6), FScalar::complex(0.8, 0.0)}));
  const PartitionParams back = io::params_from_json(io::params_to_json(q), Algebra::C, 1);
  for (int i = 0; i < 2; ++i) CHECK(norm(back.u[i] - q.u[i]) <= 1e-15);
}

TEST_CASE("input hashes separate different bytes", "[io]") {
  const std::string a = kLineInstance;
  CHECK(io::input_hash_hex(a) == io::input_hash_hex(a));
  CHECK(io::input_hash_hex(a) != io::input_hash_hex(a + " "));
  CHECK(io::input_hash_hex(a).rfind("fnv1a:", 0) == 0);
}

TEST_CASE("solve reports serialize with stable content", "[io]") {
  const io::Instance inst = io::parse_instance(kLineInstance);
  const SolveResult result =
      solve(inst.group, inst.measures, inst.automorphisms, inst.config);
  const VerifyOutcome v = run_verification(inst, result.params);
  const json rep = io::report_to_json(inst, result, v.checks);
  CHECK(rep.at("tool") == "equipart");
  CHECK(rep.at("version") == kVersion);
  CHECK(rep.at("input_hash") == io::input_hash_hex(inst.raw));
  CHECK(rep.at("group").at("label") == "C_2");
  CHECK(rep.at("solve").at("converged").get<bool>());
  CHECK(rep.at("timing").is_null());
  CHECK(io::report_to_json(inst, result, v.checks, true).at("timing").is_number());

  // A report is itself a valid params file.
  const PartitionParams back = io::params_from_json(rep, inst.algebra, inst.n);
  for (int i = 0; i < 2; ++i) CHECK(norm(back.u[i] - result.params.u[i]) <= 1e-15);
}

TEST_CASE("cli solve and verify round trip", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const std::string inst = put("line.json", kLineInstance);
  const std::string rep = path_of("line_report.json");

  const CliOut s = run_cli("solve " + inst + " -o " + rep);
  CHECK(s.code == 0);
  CHECK(has(s.text, "converged"));
  const json rj = json::parse(io::read_file(rep));
  CHECK(rj.at("solve").at("converged").get<bool>());
  CHECK(rj.at("solve").at("residual").get<double>() == 0.0);
  CHECK(rj.at("input_hash") == io::input_hash_hex(kLineInstance));
  CHECK(rj.at("timing").is_null());
  CHECK(!rj.at("checks").empty());
  for (const auto& c : rj.at("checks")) CHECK(c.at("pass").get<bool>());

  const std::string ver = path_of("line_verify.json");
  const CliOut v = run_cli("verify " + inst + " " + rep + " -o " + ver);
  CHECK(v.code == 0);
  CHECK(has(v.text, "PASS"));
  const json vj = json::parse(io::read_file(ver));
  CHECK(vj.at("pass").get<bool>());
  CHECK(vj.at("residual").get<double>() == 0.0);

  // Identical command, identical bytes (timing stays opt-in).
  const std::string rep2 = path_of("line_report2.json");
  CHECK(run_cli("solve " + inst + " -o " + rep2).code == 0);
  CHECK(io::read_file(rep) == io::read_file(rep2));

  const CliOut timed = run_cli("solve " + inst + " --emit-timing -o " + rep2);
  CHECK(timed.code == 0);
  CHECK(json::parse(io::read_file(rep2)).at("timing").is_number());
}

TEST_CASE("cli verify rejects bad partitions and bad checks", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const std::string inst = put("line.json", kLineInstance);
  const std::string bad = put("bad_params.json", R"({"u": [0.0, 1.0]})");

  const CliOut v = run_cli("verify " + inst + " " + bad);
  CHECK(v.code == 1);
  CHECK(has(v.text, "FAIL"));

  // Forced checks run on top of the auto-selected ones.
  const std::string good = path_of("line_report.json");
  REQUIRE(run_cli("solve " + inst + " -o " + good).code == 0);
  CHECK(run_cli("verify " + inst + " " + good + " --check full").code == 0);
  CHECK(run_cli("verify " + inst + " " + good + " --check opposite_pairs").code == 0);
  // |G| = 2 regions cannot be grouped mod 3: shape error, not a failed check.
  const CliOut mk = run_cli("verify " + inst + " " + good + " --check mod_k:3");
  CHECK(mk.code == 2);
  CHECK(has(mk.text, "error:"));
  CHECK(run_cli("verify " + inst + " " + good + " --check wat").code == 2);
}

TEST_CASE("cli input errors exit with code 2", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("solve " + path_of("does_not_exist.json")).code == 2);

  const std::string malformed = put("malformed.json", "{ nope");
  const CliOut m = run_cli("solve " + malformed);
  CHECK(m.code == 2);
  CHECK(has(m.text, "error:"));

  const std::string zero = put("zero_total.json", R"({
    "algebra": "R", "n": 1,
    "group": {"kind": "cyclic", "m": 2, "algebra": "R"},
    "measures": [{"kind": "points", "points": [
      {"x": [-1.0], "w": 1}, {"x": [1.0], "w": -1}]}]
  })");
  const CliOut z = run_cli("solve " + zero);
  CHECK(z.code == 2);
  CHECK(has(z.text, "total mass"));

  const CliOut h = run_cli("--help");
  CHECK(h.code == 0);
}

TEST_CASE("cli oracle scans a grid", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const std::string inst = put("line.json", kLineInstance);
  const std::string out = path_of("line_oracle.json");
  const CliOut o = run_cli("oracle " + inst + " --resolution 128 -o " + out);
  CHECK(o.code == 0);
  const json oj = json::parse(io::read_file(out));
  CHECK(oj.at("grid_points").get<long long>() == 128);
  CHECK(oj.at("best_residual").get<double>() == 0.0);
  CHECK(oj.at("sign_changes").get<long long>() >= 2);
}

TEST_CASE("cli plot renders deterministic svg for planar instances", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const std::string inst = put("fan.json", kFanInstance);
  const std::string params = put("fan_params.json", R"({"u": [[0, 0], [1, 0]]})");
  const std::string a = path_of("fan_a.svg");
  const std::string b = path_of("fan_b.svg");
  CHECK(run_cli("plot " + inst + " " + params + " -o " + a).code == 0);
  CHECK(run_cli("plot " + inst + " " + params + " -o " + b).code == 0);
  const std::string svg = io::read_file(a);
  CHECK(has(svg, "<svg"));
  CHECK(has(svg, "<circle"));
  CHECK(svg == io::read_file(b));

  const std::string quat = put("quat.json", kQuatInstance);
  const std::string qp =
      put("quat_params.json", R"({"u": [[0, 0, 0, 0], [1, 0, 0, 0]]})");
  const CliOut q = run_cli("plot " + quat + " " + qp);
  CHECK(q.code == 2);
  CHECK(has(q.text, "unsupported"));
}

TEST_CASE("cli groups subcommand", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const CliOut c4 = run_cli("groups C_4");
  CHECK(c4.code == 0);
  CHECK(has(c4.text, "C_4"));
  CHECK(has(c4.text, "order 4"));
  CHECK(has(c4.text, "cayley"));

  const CliOut q8 = run_cli("groups Q8 --json");
  CHECK(q8.code == 0);
  const json qj = json::parse(q8.text);
  CHECK(qj.at("order").get<int>() == 8);
  CHECK(qj.at("elements").size() == 8);
  CHECK(qj.at("cayley").size() == 8);

  const CliOut ico = run_cli("groups I* --json");
  CHECK(ico.code == 0);
  CHECK(json::parse(ico.text).at("elements").size() == 120);

  CHECK(run_cli("groups C_3 --algebra H").code == 0);
  CHECK(run_cli("groups X_9").code == 2);
  CHECK(run_cli("groups C_3 --algebra R").code == 2);
}

TEST_CASE("cli thread settings", "[cli]") {
  REQUIRE(kCliPath[0] != '\0');
  const std::string inst = put("line.json", kLineInstance);
  CHECK(run_cli("solve " + inst + " --threads 2").code == 0);

  const std::string base = std::string(kCliPath);
  auto with_env = [&](const std::string& env, const std::string& args) {
    CliOut r;
    const std::string cmd = "env " + env + " " + base + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.text.append(buf, got);
    const int status = pclose(p);
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
  };
  CHECK(with_env("EQUIPART_THREADS=2", "solve " + inst).code == 0);
  const CliOut bad = with_env("EQUIPART_THREADS=abc", "solve " + inst);
  CHECK(bad.code == 2);
  CHECK(has(bad.text, "EQUIPART_THREADS"));
  // An explicit flag wins over a broken environment.
  CHECK(with_env("EQUIPART_THREADS=abc", "solve " + inst + " --threads 1").code == 0);
}
