#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rotmhd/checks.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/experiment.hpp"

using namespace rotmhd;
namespace fs = std::filesystem;

namespace {

json minimal_simulate() {
  return json::parse(R"({
    "kind": "simulate",
    "seed": 7,
    "grid": {"n_h": 8, "n_v": 8, "box_h": 16.0, "box_v": 16.0},
    "model": {"eps": 0.2, "alpha": 1.0},
    "initial": {"k_min": 0.3, "l2": 2.0},
    "solver": {"dt": 0.02, "t_end": 0.1},
    "mode": "coupled_split",
    "cutoff": {"r": 0.8, "R": 2.0}
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rotmhd_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config: unknown and missing keys are named") {
  json doc = minimal_simulate();
  doc["solver"]["dtt"] = 0.1;
  CHECK(error_of(doc).find("unknown key 'solver.dtt'") != std::string::npos);

  doc = minimal_simulate();
  doc["grd"] = json::object();
  CHECK(error_of(doc).find("unknown key 'grd'") != std::string::npos);

  doc = minimal_simulate();
  doc["model"].erase("eps");
  CHECK(error_of(doc).find("missing required key 'model.eps'") != std::string::npos);

  doc = minimal_simulate();
  doc["solver"].erase("t_end");
  CHECK(error_of(doc).find("missing required key 'solver.t_end'") != std::string::npos);

  doc = minimal_simulate();
  doc["model"]["nu"] = 0.3;
  CHECK(error_of(doc).find("model.nu") != std::string::npos);

  doc = minimal_simulate();
  doc["solver"]["dt"] = "fast";
  CHECK(error_of(doc).find("'solver.dt' must be a number") != std::string::npos);

  doc = minimal_simulate();
  doc["solver"]["dt"] = -1.0;
  CHECK(error_of(doc).find("dt") != std::string::npos);

  doc = minimal_simulate();
  doc.erase("cutoff");
  CHECK(error_of(doc).find("coupled_split needs a cutoff") != std::string::npos);

  doc = minimal_simulate();
  doc["kind"] = "simulat";
  CHECK(error_of(doc).find("unknown experiment kind") != std::string::npos);
}

TEST_CASE("config: defaults, infinite eps and round trip") {
  const ExperimentConfig cfg = parse_config(minimal_simulate());
  CHECK(cfg.seed == 7);
  CHECK(cfg.model.nu == doctest::Approx(0.2));
  CHECK(cfg.model.mu == doctest::Approx(5.0));
  CHECK(cfg.solver.integrator == Integrator::if_rk4);
  CHECK(cfg.solver.cadence == 1);

  const json once = to_json(cfg);
  const json twice = to_json(parse_config(once));
  CHECK(once == twice);
  CHECK(once.dump() == twice.dump());

  json generic = minimal_simulate();
  generic["model"] = {{"kind", "generic"}, {"eps", "inf"}, {"nu", 0.1}, {"nu_m", 0.2}, {"mu", 0.0}};
  const ExperimentConfig g = parse_config(generic);
  CHECK(std::isinf(g.model.eps));
  CHECK(to_json(g)["model"]["eps"] == "inf");
  CHECK(to_json(parse_config(to_json(g))) == to_json(g));

  json strich = json::parse(R"({"kind": "strichartz", "strichartz": {"p": [1, "inf"]}})");
  const ExperimentConfig s = parse_config(strich);
  CHECK(std::isinf(s.strichartz.p[1]));
  CHECK(to_json(parse_config(to_json(s))) == to_json(s));
}

TEST_CASE("git blob hash and number formatting") {
  // `printf 'hello\n' | git hash-object --stdin`
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("CSV writer: header, rows, atomic rename") {
  const fs::path dir = scratch("csv");
  {
    CsvWriter w(dir / "a.csv", {"x", "y"});
    w.row({1.0, 0.5});
    w.row(std::vector<std::string>{"inf", "ok"});
    CHECK_FALSE(fs::exists(dir / "a.csv"));
    CHECK_THROWS(w.row(std::vector<double>{1.0}));
    w.close();
  }
  CHECK(slurp(dir / "a.csv") == "x,y\n1,0.5\ninf,ok\n");
  {
    CsvWriter w(dir / "b.csv", {"x"});
    w.row(std::vector<double>{2.0});
  }
  CHECK_FALSE(fs::exists(dir / "b.csv"));
  CHECK_FALSE(fs::exists(dir / "b.csv.tmp"));
  fs::remove_all(dir);
}

TEST_CASE("simulate run: manifest, artifacts and determinism") {
  const ExperimentConfig cfg = parse_config(minimal_simulate());
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const RunManifest m = run_experiment(cfg, a, minimal_simulate().dump());
  run_experiment(cfg, b, minimal_simulate().dump());
  CHECK(m.exit_code == kExitOk);
  CHECK(m.status == "ok");
  CHECK(m.config_hash == git_blob_hash(minimal_simulate().dump()));
  REQUIRE(m.artifacts.size() == 1);
  CHECK(m.artifacts[0].file == "diagnostics.csv");
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK_FALSE(slurp(a / "diagnostics.csv").empty());

  const json manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["config"] == to_json(cfg));
  CHECK(manifest["derived"]["cutoff"]["R"] == 2.0);
  CHECK(manifest["artifacts"][0]["columns"][0] == "t");

  ExperimentConfig other = cfg;
  other.seed = 8;
  const fs::path c = scratch("sim_c");
  run_experiment(other, c, "");
  CHECK(slurp(a / "diagnostics.csv") != slurp(c / "diagnostics.csv"));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("a one-entry sweep reproduces the simulate run") {
  json doc = minimal_simulate();
  doc["kind"] = "sweep";
  doc["sweep"] = {{"eps", {0.2}}, {"threshold_multiple", 2.0}};
  const ExperimentConfig sweep = parse_config(doc);
  const fs::path dir = scratch("sweep");
  const SweepReport rep = run_sweep(sweep, dir);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].status == "ok");
  CHECK(rep.threshold == doctest::Approx(0.2));
  CHECK(rep.data_h0s == doctest::Approx(0.4));
  CHECK(rep.smallest_completed);
  CHECK(rep.agreement_factor == 1.0);

  json sim = minimal_simulate();
  sim["initial"]["h0s"] = rep.data_h0s;
  const fs::path single = scratch("single");
  run_experiment(parse_config(sim), single, sim.dump());
  CHECK(slurp(dir / "eps_0" / "diagnostics.csv") == slurp(single / "diagnostics.csv"));
  CHECK(fs::exists(dir / "sweep.csv"));
  fs::remove_all(dir);
  fs::remove_all(single);
}

TEST_CASE("sweep keeps going after a failed entry") {
  json doc = minimal_simulate();
  doc["kind"] = "sweep";
  doc["solver"]["blowup_factor"] = 1.0000001;
  doc["solver"]["dt"] = 0.5;
  doc["solver"]["t_end"] = 2.0;
  doc["initial"]["l2"] = 400.0;
  doc["sweep"] = {{"eps", {0.5, 0.2}}, {"threshold_multiple", 0.0}};
  const fs::path dir = scratch("sweep_fail");
  const SweepReport rep = run_sweep(parse_config(doc), dir);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) CHECK(e.status != "");
  CHECK(fs::exists(dir / "eps_0" / "manifest.json"));
  CHECK(fs::exists(dir / "eps_1" / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("linear and check experiments") {
  json doc = json::parse(R"({
    "kind": "linear",
    "model": {"eps": 0.1, "alpha": 1.0},
    "linear": {"frequencies": [[0, 0, 1], [1, 1, 0]], "random": 3}
  })");
  const fs::path dir = scratch("linear");
  const RunManifest m = run_experiment(parse_config(doc), dir, doc.dump());
  CHECK(m.exit_code == kExitOk);
  CHECK(m.warnings.size() == 1);  // [1, 1, 0] is degenerate
  std::istringstream eig(slurp(dir / "eigen.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(eig, line)) ++rows;
  CHECK(rows == 30);
  CHECK(slurp(dir / "eigen.csv").find("16.180339887498") != std::string::npos);
  fs::remove_all(dir);

  json chk = json::parse(R"({
    "kind": "check",
    "model": {"eps": 0.01, "alpha": 1.0},
    "check": {"suites": ["eigen", "propagator", "cancellation"], "trials": 50, "states": 3}
  })");
  const fs::path cdir = scratch("check");
  const RunManifest cm = run_experiment(parse_config(chk), cdir, chk.dump());
  CHECK(cm.exit_code == kExitOk);
  CHECK(slurp(cdir / "checks.csv").find("cramer_residual") != std::string::npos);
  fs::remove_all(cdir);

  chk["check"]["suites"] = {"nope"};
  CHECK(error_of(chk).find("unknown suite 'nope'") != std::string::npos);
}

TEST_CASE("check suites: strong damping does not underflow the metrics") {
  // eps^alpha = 0.1 over t <= 1000 drives the solution below 1e-300
  const CheckSuite s = check_propagator(300, 0.25, 4.0, 0.01, 0.5, 3);
  for (const auto& m : s.metrics) {
    INFO(m.name);
    CHECK(std::isfinite(m.value));
    CHECK(m.pass);
  }
  CHECK(check_eigen_structure(100, 0.25, 4.0, 0.01, 0.5, 3).pass());
}

TEST_CASE("sweep entries refine the step to resolve the rotation") {
  json doc = minimal_simulate();
  doc["kind"] = "sweep";
  doc["solver"]["t_end"] = 0.04;
  doc["sweep"] = {{"eps", {0.2, 0.008}}, {"threshold_multiple", 2.0}, {"max_dt_over_eps", 1.0}};
  const fs::path dir = scratch("sweep_dt");
  const SweepReport rep = run_sweep(parse_config(doc), dir);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].dt == 0.02);
  CHECK(rep.entries[1].dt == doctest::Approx(0.02 / 3));
  const json m = json::parse(slurp(dir / "eps_1" / "manifest.json"));
  CHECK(m["config"]["solver"]["cadence"] == 3);
  fs::remove_all(dir);
}
