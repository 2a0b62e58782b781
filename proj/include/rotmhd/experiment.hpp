// Experiment configuration, orchestration and output files.
//
// Configs are JSON documents described by config/schema.json.  Every run
// writes CSV files (numbers with 17 significant digits) and a manifest.json
// into its output directory; the manifest is written last, atomically.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotmhd/dispersion.hpp"
#include "rotmhd/linear.hpp"
#include "rotmhd/random_field.hpp"
#include "rotmhd/solver.hpp"

namespace rotmhd {

using json = nlohmann::ordered_json;

enum class ExperimentKind { simulate, linear, kernels, strichartz, sweep, check };

const char* kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct GridSpec {
  int n_h = 32;
  int n_v = 32;
  double box_h = 6.283185307179586;
  double box_v = 6.283185307179586;
};

struct InitialSpec {
  RandomFieldSpec field;
  double h0s = 0.0;  // rescale the state to this H^{0,s} norm when > 0
};

// Either a fixed band (r, R) or the eps-dependent schedule.
struct CutoffSpec {
  double r = 0.0;
  double R = 0.0;
  double schedule_constant = 0.0;

  bool enabled() const { return schedule_constant > 0.0 || R > 0.0; }
};

struct LinearSpec {
  std::vector<Freq> frequencies;
  int random = 0;  // extra random frequencies with r <= |xi_h|, |xi_3|, |xi| <= R
  double r = 0.25;
  double R = 4.0;
};

struct KernelsSpec {
  std::vector<std::string> branches{"A", "B"};
  std::vector<double> R{4.0, 8.0};
  double beta = 1.0;
  double theta_min = 1.0;
  double theta_max = 1e4;
  int per_decade = 4;
  double window_decades = 1.5;
  int samples = 256;
  double tau = 0.0;
  double tau_theta = 10.0;
  double tau_r2_min = 2.0;  // tau r^2 range of the tau fit
  double tau_r2_max = 20.0;
  int tau_points = 9;
  double tol = 1e-6;
};

struct StrichartzSpec {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  std::vector<double> alpha{0.0, 0.1};
  std::vector<double> p{1.0, 2.0};  // infinity is written as "inf"
  StrichartzProfile profile;
  StrichartzOptions options;
};

struct SweepSpec {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double threshold_multiple = 50.0;  // data norm in units of the small-data threshold
  double small_data_constant = 1.0;  // c in ||U0||_{H^{0,s}} <= c eps^alpha
  // Each entry steps with dt / k, k the smallest integer with dt / k <= this
  // times eps (the cadence is multiplied by k); 0 keeps solver.dt.
  double max_dt_over_eps = 1.0;
};

// Suites of the check experiment: eigen, propagator, cancellation,
// littlewood_paley, energy, split.  eigen and propagator use model.eps and
// model.alpha; energy and split run the configured simulation.
struct CheckSpec {
  std::vector<std::string> suites{"eigen", "propagator", "cancellation", "littlewood_paley"};
  int trials = 1000;
  int states = 100;
  int fields = 5;
  double r = 0.25;
  double R = 4.0;
  int n_h = 16;  // grid of the cancellation suite
  int n_v = 16;
  double energy_tol = 1e-6;
  double min_order = 3.0;
  double split_tol = 1e-6;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  std::uint64_t seed = 1;
  GridSpec grid;
  ModelParams model;
  InitialSpec initial;
  SolverConfig solver;
  RunMode mode = RunMode::direct;
  CutoffSpec cutoff;
  LinearSpec linear;
  KernelsSpec kernels;
  StrichartzSpec strichartz;
  SweepSpec sweep;
  CheckSpec check;
  std::string output_dir = "out";

  void validate() const;
};

// Throws ConfigError naming the offending key (unknown keys included).
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
json to_json(const ExperimentConfig& cfg);

// Git blob hash: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_hash(const std::string& bytes);

std::string format_number(double v);

// Plain CSV with a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  const std::vector<std::string>& columns() const { return columns_; }
  void close();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::vector<std::string> columns_;
  std::FILE* file_ = nullptr;
};

struct Artifact {
  std::string file;
  std::vector<std::string> columns;
};

struct RunManifest {
  json config;
  json derived = json::object();
  std::string config_hash;
  std::string status = "ok";
  int exit_code = 0;
  double seconds = 0.0;
  std::vector<Artifact> artifacts;
  std::vector<std::string> warnings;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitDegraded = 4;

// Runs the configured experiment into `dir`; `config_text` is hashed into the
// manifest.  Returns the manifest (also written to dir/manifest.json).
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                           const std::string& config_text);

// The initial state of simulate/sweep runs: seeded random data, optionally
// rescaled to the configured H^{0,s} norm.
StateVector initial_state(const ExperimentConfig& cfg);

struct SweepEntry {
  double eps = 0.0;
  double dt = 0.0;
  double r = 0.0;
  double R = 0.0;
  std::string status;
  bool blowup = false;
  double t_reached = 0.0;
  double sup_tilde_h0s = 0.0;
  double ratio = 0.0;  // sup_t ||Utilde||_{H^{0,s}} / eps^alpha
  double bootstrap_threshold = 0.0;
  double high_h0s = 0.0;
  double y_norm = 0.0;
  std::string error;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  double data_h0s = 0.0;
  double threshold = 0.0;
  bool ratio_non_increasing = false;
  bool smallest_completed = false;
  double fitted_constant = 0.0;    // largest ratio among the two smallest eps
  double agreement_factor = 0.0;   // max/min ratio over the two smallest eps
};

SweepReport run_sweep(const ExperimentConfig& base, const std::filesystem::path& dir);

}  // namespace rotmhd
