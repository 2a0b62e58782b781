// Acceptance driver: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,3,10] [--out <dir>] [--seed <n>]
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "rotmhd/checks.hpp"
#include "rotmhd/cutoff.hpp"
#include "rotmhd/dispersion.hpp"
#include "rotmhd/experiment.hpp"
#include "rotmhd/random_field.hpp"

using namespace rotmhd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string suite_detail(const CheckSuite& s) {
  std::string d;
  for (const auto& m : s.metrics) {
    if (!d.empty()) d += ", ";
    d += m.name + " " + fmt("%.3g", m.value) + (m.upper ? " <= " : " >= ") +
         fmt("%.3g", m.threshold);
  }
  return d;
}

Outcome from_suite(const CheckSuite& s) { return {s.pass(), suite_detail(s)}; }

Outcome energy_identity(std::uint64_t seed) {
  const Grid g(32, 32, 2 * std::numbers::pi, 2 * std::numbers::pi);
  RandomFieldSpec spec;
  spec.k_min = 0.5;
  spec.k_max = 8.0;
  spec.l2 = 20.0;
  const StateVector U0 = random_state(g, spec, seed);
  SolverConfig cfg;
  cfg.t_end = 1.0;
  return from_suite(check_energy_identity(U0, cfg, ModelParams::rotating(0.1, 1.0)));
}

Outcome kernel_decay(std::uint64_t seed) {
  std::vector<double> theta;
  for (int i = 0; i <= 16; ++i) theta.push_back(std::pow(10.0, i / 4.0));
  Outcome o{true, ""};
  for (Branch b : {Branch::A, Branch::B}) {
    for (double R : {4.0, 8.0}) {
      const double r = 1.0 / R;
      DecayFitOptions opt;
      opt.theta = theta;
      opt.seed = seed;
      const DecayFit fit = kernel_decay_fit(b, r, R, 1.0, opt);
      std::vector<double> taus;
      for (int i = 0; i < 9; ++i) taus.push_back((2.0 + 18.0 * i / 8.0) / (r * r));
      const TauFit tf = kernel_tau_fit(b, r, R, 10.0, taus, 256, seed);
      const bool theta_ok = fit.slope >= -0.65 && fit.slope <= -0.35;
      const bool tau_ok = std::abs(tf.slope / tf.expected - 1.0) <= 0.2;
      const bool ok = theta_ok && tau_ok && !fit.accuracy_degraded && !tf.accuracy_degraded;
      o.pass = o.pass && ok;
      if (!o.detail.empty()) o.detail += "; ";
      o.detail += std::string(branch_name(b)) + " R=" + fmt("%g", R) + ": theta-slope " +
                  fmt("%.3f", fit.slope) + (theta_ok ? "" : " (outside [-0.65,-0.35])") +
                  ", tau-slope/expected " + fmt("%.3f", tf.slope / tf.expected) +
                  (fit.accuracy_degraded || tf.accuracy_degraded ? ", degraded" : "");
    }
  }
  return o;
}

Outcome strichartz_scaling() {
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const std::vector<double> ps{1.0, 2.0};
  Outcome o{true, ""};
  for (double alpha : {0.0, 0.1}) {
    StrichartzOptions opt;
    opt.alpha = alpha;
    const ScalingSweep sw = strichartz_scaling_sweep(StrichartzProfile{}, eps, ps, opt);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const bool ok = sw.slope[k] >= sw.predicted[k] - 0.05 && !sw.accuracy_degraded;
      o.pass = o.pass && ok;
      if (!o.detail.empty()) o.detail += "; ";
      o.detail += "alpha " + fmt("%g", alpha) + " p " + fmt("%g", ps[k]) + ": slope " +
                  fmt("%.3f", sw.slope[k]) + " vs bound " + fmt("%.4f", sw.predicted[k]) +
                  (sw.accuracy_degraded ? " (degraded)" : "");
    }
  }
  return o;
}

ExperimentConfig sweep_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::sweep;
  cfg.seed = seed;
  const double alpha0 = admissible_alpha(1.0, 1.0, 1.0);
  cfg.model = ModelParams::rotating(0.1, alpha0);
  cfg.grid = {48, 32, 54.0, 54.0};
  cfg.initial.field.k_min = 0.1;
  cfg.initial.field.k_max = 1.7;
  cfg.initial.field.min_h = 0.1;
  cfg.initial.field.min_v = 0.1;
  cfg.solver.dt = 0.01;
  cfg.solver.t_end = 5.0;
  cfg.solver.cadence = 10;
  cfg.mode = RunMode::coupled_split;
  cfg.cutoff.schedule_constant = 2.0;
  cfg.sweep.eps = {1e-1, 1e-2, 1e-3};
  cfg.sweep.threshold_multiple = 50.0;
  return cfg;
}

Outcome global_sweep(const fs::path& out, std::uint64_t seed) {
  const SweepReport rep = run_sweep(sweep_config(seed), out / "sweep");
  Outcome o;
  o.pass = rep.smallest_completed && rep.agreement_factor > 0 && rep.agreement_factor <= 2.0;
  o.detail = "data H^{0,s} " + fmt("%.4g", rep.data_h0s) + "; ";
  for (const auto& e : rep.entries)
    o.detail += "eps " + fmt("%g", e.eps) + " " + e.status + " ratio " + fmt("%.4g", e.ratio) +
                " (initial high part " + fmt("%.4g", e.high_h0s) + "); ";
  o.detail += "agreement x" + fmt("%.3f", rep.agreement_factor) +
              (rep.ratio_non_increasing ? ", non-increasing" : ", not monotone");
  return o;
}

Outcome split_consistency(std::uint64_t seed) {
  const Grid g(32, 32, 16.0, 16.0);
  RandomFieldSpec spec;
  spec.k_min = 0.3;
  spec.k_max = 5.0;
  spec.l2 = 5.0;
  const StateVector U0 = random_state(g, spec, seed);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.cadence = 10;
  cfg.cutoff = CutoffBand{0.8, 2.0};
  return from_suite(check_split_consistency(U0, cfg, ModelParams::rotating(0.1, 1.0)));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& out, std::uint64_t seed) {
  std::vector<ExperimentConfig> cfgs;
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::simulate;
    c.seed = seed;
    c.grid = {16, 16, 16.0, 16.0};
    c.model = ModelParams::rotating(0.1, 1.0);
    c.initial.field.k_min = 0.3;
    c.initial.field.l2 = 3.0;
    c.solver.dt = 0.01;
    c.solver.t_end = 0.3;
    c.mode = RunMode::coupled_split;
    c.cutoff.r = 0.8;
    c.cutoff.R = 2.0;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::linear;
    c.seed = seed;
    c.model = ModelParams::rotating(0.01, 0.5);
    c.linear.random = 50;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::strichartz;
    c.seed = seed;
    c.strichartz.eps = {1.0, 1e-2};
    c.strichartz.alpha = {0.1};
    c.strichartz.p = {1.0, INFINITY};
    c.strichartz.options.x_samples = 16;
    c.strichartz.options.xi3_nodes = 8;
    cfgs.push_back(c);
  }
  Outcome o{true, ""};
  std::size_t files = 0;
  for (const auto& c : cfgs) {
    const fs::path a = out / "determinism" / (std::string(kind_name(c.kind)) + "_1");
    const fs::path b = out / "determinism" / (std::string(kind_name(c.kind)) + "_2");
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string text = to_json(c).dump();
    run_experiment(c, a, text);
    run_experiment(c, b, text);
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        o.pass = false;
        o.detail += "differs: " + entry.path().filename().string() + "; ";
      }
    }
  }
  o.detail += std::to_string(files) + " CSV files compared byte by byte";
  o.pass = o.pass && files > 0;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_out";
  std::uint64_t seed = 20240601;
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--out", out, "scratch directory for run outputs");
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const fs::path dir(out);
  const std::vector<Criterion> all{
      {1, "eigen-structure exactness", 10.0,
       [&] { return from_suite(check_eigen_structure(1000, 0.25, 4.0, 0.01, 0.5, seed)); }},
      {2, "exact propagator", 30.0,
       [&] { return from_suite(check_propagator(1000, 0.25, 4.0, 0.01, 1.0, seed)); }},
      {3, "energy identity", 300.0, [&] { return energy_identity(seed); }},
      {4, "cancellation identities", 60.0,
       [&] { return from_suite(check_cancellations(100, 16, 16, seed)); }},
      {5, "Littlewood-Paley", 60.0,
       [&] { return from_suite(check_littlewood_paley(5, 1.0, seed)); }},
      {6, "kernel decay", 600.0, [&] { return kernel_decay(seed); }},
      {7, "Strichartz scaling", 1800.0, [&] { return strichartz_scaling(); }},
      {8, "global-existence sweep", 7200.0, [&] { return global_sweep(dir, seed); }},
      {9, "two-route consistency", 600.0, [&] { return split_consistency(seed); }},
      {10, "determinism", 600.0, [&] { return determinism(dir, seed); }},
  };

  fs::create_directories(dir);
  bool all_pass = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %2d %s %s: %s (%.1f s of %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), secs, c.budget, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
