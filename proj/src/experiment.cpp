#include "rotmhd/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "rotmhd/checks.hpp"
#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"

#include <Eigen/Eigenvalues>

namespace rotmhd {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- reading

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + label() + "' must be an object");
  }

  std::string key_name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double def, bool allow_inf = false) {
    const json* v = find(key);
    return v ? as_number(*v, key, allow_inf) : def;
  }

  double required_number(const std::string& key, bool allow_inf = false) {
    const json* v = find(key);
    if (!v) throw ConfigError("config: missing required key '" + key_name(key) + "'");
    return as_number(*v, key, allow_inf);
  }

  int integer(const std::string& key, int def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) throw type_error(key, "an integer");
    const auto x = v->get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      throw ConfigError("config: '" + key_name(key) + "' is out of range");
    return static_cast<int>(x);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    throw type_error(key, "a non-negative integer");
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) throw type_error(key, "a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def,
                              bool allow_inf = false) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_array()) throw type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) out.push_back(as_number(x, key, allow_inf));
    return out;
  }

  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_array()) throw type_error(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& x : *v) {
      if (!x.is_string()) throw type_error(key, "an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    const json* v = find(key);
    return Section(v ? *v : empty, key_name(key));
  }

  // Rejects every key that was never looked up.
  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError("config: unknown key '" + key_name(item.key()) + "'");
  }

  ConfigError type_error(const std::string& key, const char* what) const {
    return ConfigError("config: '" + key_name(key) + "' must be " + what);
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  double as_number(const json& v, const std::string& key, bool allow_inf) const {
    if (v.is_number()) return v.get<double>();
    if (allow_inf && v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return INFINITY;
    }
    throw type_error(key, allow_inf ? "a number or \"inf\"" : "a number");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json numbers_or_inf(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_or_inf(x));
  return a;
}

const char* integrator_name(Integrator i) {
  return i == Integrator::if_rk4 ? "if_rk4" : "imex_euler";
}

const char* mode_name(RunMode m) { return m == RunMode::direct ? "direct" : "coupled_split"; }

Branch parse_branch(const std::string& s) {
  if (s == "A") return Branch::A;
  if (s == "B") return Branch::B;
  throw ConfigError("config: branch must be \"A\" or \"B\" (got \"" + s + "\")");
}

// ---------------------------------------------------------------- helpers

using Clock = std::chrono::steady_clock;

Grid make_grid(const GridSpec& g) { return Grid(g.n_h, g.n_v, g.box_h, g.box_v); }

ModelParams with_eps(const ModelParams& p, double eps) {
  if (p.kind == SystemKind::rotating)
    return ModelParams::rotating(eps, p.alpha, p.s, p.eta, p.beta);
  ModelParams q = p;
  q.eps = eps;
  return q;
}

json schedule_json(const CutoffParams& c) {
  json j;
  j["eps"] = c.eps;
  j["alpha"] = c.alpha;
  j["schedule_constant"] = c.schedule_constant;
  j["R"] = c.R;
  j["r"] = c.r;
  j["alpha0"] = c.alpha0;
  j["alpha_admissible"] = c.alpha_admissible;
  j["exponent_low"] = c.exponent_low;
  j["exponent_high"] = c.exponent_high;
  j["exponents_positive"] = c.exponents_positive;
  j["bootstrap_margin"] = c.bootstrap_margin;
  return j;
}

// The solver settings with the cutoff resolved from the band or schedule.
SolverConfig resolved_solver(const ExperimentConfig& cfg, RunManifest& m) {
  SolverConfig s = cfg.solver;
  const ModelParams& p = cfg.model;
  if (cfg.cutoff.schedule_constant > 0.0) {
    const CutoffParams c = schedule_parameters(p.eps, p.alpha, p.beta, p.eta, p.s,
                                               cfg.cutoff.schedule_constant);
    m.derived["schedule"] = schedule_json(c);
    if (!c.alpha_admissible)
      m.warnings.push_back("alpha exceeds alpha0 = " + format_number(c.alpha0));
    s.cutoff = CutoffBand{c.r, c.R};
  } else if (cfg.cutoff.R > 0.0) {
    s.cutoff = CutoffBand{cfg.cutoff.r, cfg.cutoff.R};
  }
  if (s.cutoff) {
    m.derived["cutoff"] = {{"r", s.cutoff->r}, {"R", s.cutoff->R}};
    const std::string res = check_band_resolution(make_grid(cfg.grid), s.cutoff->r);
    if (!res.empty()) m.warnings.push_back(res);
  }
  return s;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const int n = std::max(2, static_cast<int>(std::lround(std::log10(hi / lo) * per_decade)) + 1);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

std::string tag(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void add_artifact(RunManifest& m, const CsvWriter& w, const std::string& file) {
  m.artifacts.push_back({file, w.columns()});
}

// ---------------------------------------------------------------- simulate

const std::vector<std::string> kDiagnosticsColumns{
    "t", "energy", "h_gradient", "h0s", "dissipation", "energy_residual",
    "ltilde_inf", "ltilde_2", "tilde_h0s", "blowup"};

struct SimulateSummary {
  RunResult result;
  double R = 0.0, r = 0.0;
  double high_h0s = 0.0;
  double y = 0.0;

  explicit SimulateSummary(const Grid& g) : result(g) {}
};

SimulateSummary simulate_into(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& m) {
  const Grid g = make_grid(cfg.grid);
  const SolverConfig solver = resolved_solver(cfg, m);
  const StateVector U0 = initial_state(cfg);
  SimulateSummary out(g);
  out.y = y_norm(U0, cfg.model.s, cfg.model.eta);
  if (!std::isfinite(out.y)) throw InvariantError("initial data: Y norm is not finite");
  m.derived["data"] = {{"l2", l2_norm(U0)},
                       {"h0s", h0s_norm(U0, cfg.model.s)},
                       {"y_norm", out.y}};
  if (solver.cutoff) {
    out.r = solver.cutoff->r;
    out.R = solver.cutoff->R;
    const SplitResult split = split_initial_data(U0, out.r, out.R, cfg.model);
    out.high_h0s = split.high_h0s;
    m.derived["data"]["high_h0s"] = split.high_h0s;
    m.derived["data"]["empirical_constant"] = split.empirical_constant;
  }

  out.result = run(U0, solver, cfg.model, cfg.mode);
  const RunResult& res = out.result;
  CsvWriter w(dir / "diagnostics.csv", kDiagnosticsColumns);
  for (const auto& rec : res.records)
    w.row({rec.t, rec.energy, rec.h_gradient, rec.h0s, rec.dissipation, rec.energy_residual,
           rec.ltilde_inf, rec.ltilde_2, rec.tilde_h0s, rec.blowup ? 1.0 : 0.0});
  w.close();
  add_artifact(m, w, "diagnostics.csv");

  m.derived["run"] = {{"t_reached", res.t_reached},
                      {"sup_tilde_h0s", res.sup_tilde_h0s},
                      {"bootstrap_threshold", res.bootstrap_threshold},
                      {"blowup", res.blowup}};
  for (const auto& wmsg : res.warnings) m.warnings.push_back(wmsg);
  m.status = res.status;
  if (res.blowup) m.exit_code = kExitBlowup;
  return out;
}

// ---------------------------------------------------------------- linear

Freq random_band_freq(std::mt19937_64& rng, double r, double R) {
  std::uniform_real_distribution<double> d(-R, R);
  for (;;) {
    Freq xi{d(rng), d(rng), d(rng)};
    if (in_band(xi, r, R)) return xi;
  }
}

Vec6 random_solenoidal(std::mt19937_64& rng, const Freq& xi) {
  std::normal_distribution<double> n;
  Eigen::Vector3cd u, b;
  for (int i = 0; i < 3; ++i) {
    u(i) = cplx(n(rng), n(rng));
    b(i) = cplx(n(rng), n(rng));
  }
  const Eigen::Vector3d k(xi[0], xi[1], xi[2]);
  u -= k * (k.cast<cplx>().dot(u)) / k.squaredNorm();
  b -= k * (k.cast<cplx>().dot(b)) / k.squaredNorm();
  Vec6 v;
  v << u, b;
  return v;
}

void run_linear(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& m) {
  std::vector<Freq> xs = cfg.linear.frequencies;
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < cfg.linear.random; ++i)
    xs.push_back(random_band_freq(rng, cfg.linear.r, cfg.linear.R));

  std::vector<std::string> cols{"xi1", "xi2", "xi3", "index", "lambda_re", "lambda_im",
                                "numeric_lambda_error", "vector_residual"};
  for (int c = 1; c <= 6; ++c) {
    cols.push_back("w" + std::to_string(c) + "_re");
    cols.push_back("w" + std::to_string(c) + "_im");
  }
  CsvWriter eig(dir / "eigen.csv", cols);
  CsvWriter res(dir / "residuals.csv", {"xi1", "xi2", "xi3", "degenerate", "det_closed_form",
                                        "det_numeric", "det_rel_error", "cramer_residual"});
  int degenerate = 0;
  for (const Freq& xi : xs) {
    const ModeEigenSystem sys = mode_eigensystem(xi, cfg.model);
    const Mat6 M = assemble_symbol(xi, cfg.model);
    const Eigen::ComplexEigenSolver<Mat6> solver(M, false);
    double radius = 0.0;
    for (const auto& l : sys.lambdas) radius = std::max(radius, std::abs(l));
    for (int i = 0; i < 6; ++i) {
      double dist = INFINITY;
      for (int j = 0; j < 6; ++j) dist = std::min(dist, std::abs(solver.eigenvalues()(j) - sys.lambdas[i]));
      std::vector<double> row{xi[0], xi[1], xi[2], static_cast<double>(i + 1),
                              sys.lambdas[i].real(), sys.lambdas[i].imag(),
                              radius > 0 ? dist / radius : dist};
      if (sys.degenerate) {
        row.insert(row.end(), 13, NAN);
      } else {
        const Vec6& W = sys.W[i];
        row.push_back((M * W - sys.lambdas[i] * W).norm() / (M.norm() * W.norm()));
        for (int c = 0; c < 6; ++c) {
          row.push_back(W(c).real());
          row.push_back(W(c).imag());
        }
      }
      eig.row(row);
    }
    const double det_cf = cramer_det_closed_form(xi);
    double det_num = NAN, det_err = NAN, cramer = NAN;
    if (sys.degenerate) {
      ++degenerate;
    } else {
      det_num = std::abs(cramer_matrix(xi, cfg.model).determinant());
      det_err = std::abs(det_num - det_cf) / det_cf;
      const Vec6 U0 = random_solenoidal(rng, xi);
      const auto C = cramer_coefficients(U0, xi, cfg.model);
      Vec6 rec = Vec6::Zero();
      for (int i = 0; i < 4; ++i) rec += C[i] * sys.W[i + 2];
      cramer = (rec - U0).norm() / U0.norm();
    }
    res.row({xi[0], xi[1], xi[2], sys.degenerate ? 1.0 : 0.0, det_cf, det_num, det_err, cramer});
  }
  eig.close();
  res.close();
  add_artifact(m, eig, "eigen.csv");
  add_artifact(m, res, "residuals.csv");
  m.derived["frequencies"] = xs.size();
  if (degenerate > 0) m.warnings.push_back(std::to_string(degenerate) + " degenerate frequencies");
}

// ---------------------------------------------------------------- kernels

void run_kernels(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& m) {
  const KernelsSpec& k = cfg.kernels;
  const std::vector<double> theta = log_grid(k.theta_min, k.theta_max, k.per_decade);
  CsvWriter fits(dir / "kernel_fits.csv",
                 {"branch", "R", "r", "beta", "theta_slope", "window_lo", "window_hi",
                  "bound_ratio", "tau_slope", "tau_expected", "degraded", "phase_lower",
                  "phase_upper", "phase_derivative"});
  bool degraded = false;
  for (const std::string& bname : k.branches) {
    const Branch b = parse_branch(bname);
    for (double R : k.R) {
      const double r = std::pow(R, -k.beta);
      DecayFitOptions opt;
      opt.theta = theta;
      opt.tau = k.tau;
      opt.samples = k.samples;
      opt.seed = cfg.seed;
      opt.window_hi = k.theta_max;
      opt.window_lo = k.theta_max / std::pow(10.0, k.window_decades);
      opt.tol = k.tol;
      const DecayFit fit = kernel_decay_fit(b, r, R, k.beta, opt);
      const std::string stem = bname + "_R" + tag(R);
      CsvWriter d(dir / ("decay_" + stem + ".csv"), {"theta", "sup_abs", "error"});
      for (std::size_t i = 0; i < fit.theta.size(); ++i)
        d.row({fit.theta[i], fit.sup_abs[i], fit.error[i]});
      d.close();
      add_artifact(m, d, "decay_" + stem + ".csv");

      std::vector<double> taus;
      for (int i = 0; i < k.tau_points; ++i) {
        const double v = k.tau_points == 1 ? k.tau_r2_min
                                           : k.tau_r2_min + (k.tau_r2_max - k.tau_r2_min) * i /
                                                                (k.tau_points - 1);
        taus.push_back(v / (r * r));
      }
      const TauFit tf = kernel_tau_fit(b, r, R, k.tau_theta, taus, k.samples, cfg.seed, k.tol);
      CsvWriter t(dir / ("tau_" + stem + ".csv"), {"tau", "sup_abs"});
      for (std::size_t i = 0; i < tf.tau.size(); ++i) t.row({tf.tau[i], tf.sup_abs[i]});
      t.close();
      add_artifact(m, t, "tau_" + stem + ".csv");

      const PhaseBoundConstants pc = phase_bound_constants(b, r, R, k.beta, k.samples, cfg.seed);
      const bool bad = fit.accuracy_degraded || tf.accuracy_degraded;
      degraded = degraded || bad;
      fits.row(std::vector<std::string>{
          bname, format_number(R), format_number(r), format_number(k.beta),
          format_number(fit.slope), format_number(fit.window_lo), format_number(fit.window_hi),
          format_number(fit.bound_ratio), format_number(tf.slope), format_number(tf.expected),
          bad ? "1" : "0", format_number(pc.lower), format_number(pc.upper),
          format_number(pc.derivative)});
    }
  }
  fits.close();
  add_artifact(m, fits, "kernel_fits.csv");
  if (degraded) {
    m.status = "accuracy_degraded";
    m.exit_code = kExitDegraded;
  }
}

// ---------------------------------------------------------------- strichartz

void run_strichartz(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& m) {
  const StrichartzSpec& s = cfg.strichartz;
  CsvWriter norms(dir / "strichartz.csv", {"alpha", "p", "eps", "norm"});
  CsvWriter fits(dir / "strichartz_fits.csv", {"alpha", "p", "slope", "predicted", "margin"});
  bool degraded = false;
  for (std::size_t a = 0; a < s.alpha.size(); ++a) {
    StrichartzOptions opt = s.options;
    opt.alpha = s.alpha[a];
    const ScalingSweep sw = strichartz_scaling_sweep(s.profile, s.eps, s.p, opt);
    degraded = degraded || sw.accuracy_degraded;
    for (std::size_t k = 0; k < s.p.size(); ++k) {
      for (std::size_t e = 0; e < s.eps.size(); ++e)
        norms.row(std::vector<std::string>{format_number(opt.alpha), format_number(s.p[k]),
                                           format_number(s.eps[e]),
                                           format_number(sw.norms[k][e])});
      fits.row(std::vector<std::string>{format_number(opt.alpha), format_number(s.p[k]),
                                        format_number(sw.slope[k]),
                                        format_number(sw.predicted[k]),
                                        format_number(sw.slope[k] - sw.predicted[k])});
    }
    for (std::size_t e = 0; e < sw.runs.size(); ++e) {
      const StrichartzResult& run_e = sw.runs[e];
      const std::string file = "series_alpha" + std::to_string(a) + "_eps" + std::to_string(e) + ".csv";
      CsvWriter w(dir / file, {"t", "value"});
      w.row({0.0, run_e.value_t0});
      for (std::size_t i = 0; i < run_e.t.size(); ++i) w.row({run_e.t[i], run_e.value[i]});
      w.close();
      add_artifact(m, w, file);
      if (run_e.accuracy_degraded)
        m.warnings.push_back(file + ": panel refinement changed the last value by " +
                             format_number(run_e.error_estimate));
    }
  }
  norms.close();
  fits.close();
  add_artifact(m, norms, "strichartz.csv");
  add_artifact(m, fits, "strichartz_fits.csv");
  if (degraded) {
    m.status = "accuracy_degraded";
    m.exit_code = kExitDegraded;
  }
}

// ---------------------------------------------------------------- check

void run_check(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& m) {
  const CheckSpec& c = cfg.check;
  CsvWriter w(dir / "checks.csv", {"suite", "metric", "value", "threshold", "relation", "pass"});
  bool all = true;
  json timing = json::object();
  for (const std::string& name : c.suites) {
    CheckSuite suite;
    if (name == "eigen") {
      suite = check_eigen_structure(c.trials, c.r, c.R, cfg.model.eps, cfg.model.alpha, cfg.seed);
    } else if (name == "propagator") {
      suite = check_propagator(c.trials, c.r, c.R, cfg.model.eps, cfg.model.alpha, cfg.seed);
    } else if (name == "cancellation") {
      suite = check_cancellations(c.states, c.n_h, c.n_v, cfg.seed);
    } else if (name == "littlewood_paley") {
      suite = check_littlewood_paley(c.fields, cfg.model.s, cfg.seed);
    } else if (name == "energy") {
      EnergyCheckOptions opt;
      const double dt = cfg.solver.dt;
      opt.dt = {4 * dt, 2 * dt, dt};
      opt.dt_target = dt;
      opt.energy_tol = c.energy_tol;
      opt.min_order = c.min_order;
      suite = check_energy_identity(initial_state(cfg), cfg.solver, cfg.model, opt);
    } else if (name == "split") {
      const SolverConfig solver = resolved_solver(cfg, m);
      suite = check_split_consistency(initial_state(cfg), solver, cfg.model, c.split_tol);
    }
    timing[name] = suite.seconds;
    for (const auto& metric : suite.metrics) {
      w.row(std::vector<std::string>{name, metric.name, format_number(metric.value),
                                     format_number(metric.threshold),
                                     metric.upper ? "<=" : ">=", metric.pass ? "1" : "0"});
    }
    all = all && suite.pass();
  }
  w.close();
  add_artifact(m, w, "checks.csv");
  m.derived["suite_seconds"] = timing;
  if (!all) {
    m.status = "check_failed";
    m.exit_code = kExitDegraded;
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------- config

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::linear: return "linear";
    case ExperimentKind::kernels: return "kernels";
    case ExperimentKind::strichartz: return "strichartz";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::check: return "check";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::linear, ExperimentKind::kernels,
                 ExperimentKind::strichartz, ExperimentKind::sweep, ExperimentKind::check})
    if (s == kind_name(k)) return k;
  throw ConfigError("config: unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  make_grid(grid);
  try {
    model.validate();
  } catch (const ParameterError& e) {
    fail(e.what());
  }
  const bool runs = kind == ExperimentKind::simulate || kind == ExperimentKind::sweep;
  if (runs || kind == ExperimentKind::check) solver.validate();
  if (initial.field.k_min < 0 || !(initial.field.k_max > initial.field.k_min))
    fail("initial: need 0 <= k_min < k_max");
  if (initial.field.min_h < 0 || initial.field.min_v < 0) fail("initial: min_h, min_v must be >= 0");
  if (!(initial.field.l2 >= 0)) fail("initial.l2 must be >= 0");
  if (!(initial.h0s >= 0)) fail("initial.h0s must be >= 0");
  if (cutoff.schedule_constant < 0) fail("cutoff.schedule_constant must be > 0");
  if (cutoff.schedule_constant > 0 && (cutoff.R > 0 || cutoff.r > 0))
    fail("cutoff: give either r and R or schedule_constant, not both");
  if (cutoff.R > 0 && !(cutoff.r > 0 && cutoff.r < cutoff.R)) fail("cutoff: need 0 < r < R");
  if (mode == RunMode::coupled_split && !cutoff.enabled())
    fail("mode coupled_split needs a cutoff (r and R, or schedule_constant)");

  switch (kind) {
    case ExperimentKind::simulate:
      break;
    case ExperimentKind::sweep:
      if (sweep.eps.empty()) fail("sweep.eps must not be empty");
      for (double e : sweep.eps)
        if (!(e > 0) || !std::isfinite(e)) fail("sweep.eps entries must be positive and finite");
      if (!cutoff.enabled()) fail("sweep needs a cutoff (r and R, or schedule_constant)");
      if (sweep.threshold_multiple < 0) fail("sweep.threshold_multiple must be >= 0");
      if (!(sweep.small_data_constant > 0)) fail("sweep.small_data_constant must be > 0");
      if (!(sweep.max_dt_over_eps >= 0)) fail("sweep.max_dt_over_eps must be >= 0");
      break;
    case ExperimentKind::linear:
      if (!(linear.r > 0 && linear.r < linear.R)) fail("linear: need 0 < r < R");
      if (linear.random < 0) fail("linear.random must be >= 0");
      for (const Freq& xi : linear.frequencies)
        if (xi == Freq{0.0, 0.0, 0.0}) fail("linear.frequencies: xi = 0 has no eigen-structure");
      if (linear.frequencies.empty() && linear.random == 0) fail("linear: no frequencies");
      break;
    case ExperimentKind::kernels:
      if (kernels.branches.empty() || kernels.R.empty()) fail("kernels: branches and R must be non-empty");
      for (const auto& b : kernels.branches) parse_branch(b);
      for (double R : kernels.R)
        if (!(R > 1.0)) fail("kernels.R entries must be > 1");
      if (!(kernels.beta >= 1)) fail("kernels.beta must be >= 1");
      if (!(kernels.theta_min > 0) || kernels.theta_max / kernels.theta_min < 1e3 * (1 - 1e-12))
        fail("kernels: theta range must span at least 3 decades");
      if (kernels.per_decade < 1) fail("kernels.per_decade must be >= 1");
      if (!(kernels.window_decades > 0)) fail("kernels.window_decades must be > 0");
      if (kernels.samples < 1) fail("kernels.samples must be >= 1");
      if (!(kernels.tau >= 0)) fail("kernels.tau must be >= 0");
      if (!(kernels.tau_r2_min >= 0 && kernels.tau_r2_max > kernels.tau_r2_min))
        fail("kernels: need 0 <= tau_r2_min < tau_r2_max");
      if (kernels.tau_points < 2) fail("kernels.tau_points must be >= 2");
      if (!(kernels.tol > 0)) fail("kernels.tol must be > 0");
      break;
    case ExperimentKind::strichartz: {
      const auto& s = strichartz;
      if (s.eps.size() < 2) fail("strichartz.eps needs at least two values");
      for (double e : s.eps)
        if (!(e > 0) || !std::isfinite(e)) fail("strichartz.eps entries must be positive and finite");
      const auto [lo, hi] = std::minmax_element(s.eps.begin(), s.eps.end());
      if (*hi / *lo < 100 * (1 - 1e-12)) fail("strichartz.eps must span at least 2 decades");
      for (double a : s.alpha)
        if (!(a >= 0 && a < 1.0 / 3.0)) fail("strichartz.alpha entries must lie in [0, 1/3)");
      for (double p : s.p)
        if (!(p >= 1)) fail("strichartz.p entries must be >= 1 or \"inf\"");
      const auto& o = s.options;
      if (!(o.r > 0 && o.r < o.R)) fail("strichartz.options: need 0 < r < R");
      if (o.sign != 1 && o.sign != -1) fail("strichartz.options.sign must be +1 or -1");
      if (o.t_per_decade < 1 || o.xi3_nodes < 2 || o.x_samples < 2)
        fail("strichartz.options: t_per_decade >= 1, xi3_nodes >= 2, x_samples >= 2");
      if (!(o.panel_factor > 0) || !(o.damping_cut > 0))
        fail("strichartz.options: panel_factor and damping_cut must be > 0");
      const auto& f = s.profile;
      if (!(f.rho_width > 0 && f.xi3_width > 0 && f.rho0 - f.rho_width >= 0))
        fail("strichartz.profile: widths must be > 0 and rho0 >= rho_width");
      break;
    }
    case ExperimentKind::check: {
      static const std::set<std::string> known{"eigen", "propagator", "cancellation",
                                               "littlewood_paley", "energy", "split"};
      if (check.suites.empty()) fail("check.suites must not be empty");
      for (const auto& n : check.suites)
        if (!known.count(n)) fail("check.suites: unknown suite '" + n + "'");
      if (check.trials < 1 || check.states < 1 || check.fields < 1)
        fail("check: trials, states and fields must be >= 1");
      if (!(check.r > 0 && check.r < check.R)) fail("check: need 0 < r < R");
      Grid(check.n_h, check.n_v, 1.0, 1.0);
      if (std::count(check.suites.begin(), check.suites.end(), "split") && !cutoff.enabled())
        fail("check suite 'split' needs a cutoff");
      break;
    }
  }
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "");
  if (const json* k = root.find("kind")) {
    if (!k->is_string()) throw root.type_error("kind", "a string");
    cfg.kind = parse_kind(k->get<std::string>());
  }
  cfg.seed = root.unsigned_integer("seed", cfg.seed);
  cfg.output_dir = root.string("output_dir", cfg.output_dir);

  {
    Section g = root.child("grid");
    cfg.grid.n_h = g.integer("n_h", cfg.grid.n_h);
    cfg.grid.n_v = g.integer("n_v", cfg.grid.n_v);
    cfg.grid.box_h = g.number("box_h", cfg.grid.box_h);
    cfg.grid.box_v = g.number("box_v", cfg.grid.box_v);
    g.finish();
  }

  const bool needs_model = cfg.kind == ExperimentKind::simulate ||
                           cfg.kind == ExperimentKind::sweep ||
                           cfg.kind == ExperimentKind::linear ||
                           cfg.kind == ExperimentKind::check;
  {
    Section m = root.child("model");
    const std::string kind = m.string("kind", "rotating");
    const double eps = needs_model ? m.required_number("eps", true) : m.number("eps", 0.1, true);
    const double alpha = m.number("alpha", 0.0);
    const double s = m.number("s", 1.0);
    const double eta = m.number("eta", 1.0);
    const double beta = m.number("beta", 1.0);
    if (kind == "rotating") {
      for (const char* fixed : {"nu", "nu_m", "mu"})
        if (m.has(fixed))
          throw ConfigError("config: '" + m.key_name(fixed) +
                            "' is fixed by eps and alpha in the rotating system");
      cfg.model = ModelParams::rotating(eps, alpha, s, eta, beta);
    } else if (kind == "generic") {
      cfg.model = ModelParams::generic(eps, m.required_number("nu"), m.required_number("nu_m"),
                                       m.required_number("mu"), s, eta, beta);
      cfg.model.alpha = alpha;
    } else {
      throw ConfigError("config: model.kind must be \"rotating\" or \"generic\"");
    }
    m.finish();
  }

  {
    Section i = root.child("initial");
    RandomFieldSpec& f = cfg.initial.field;
    f.k_min = i.number("k_min", f.k_min);
    f.k_max = i.number("k_max", f.k_max, true);
    f.min_h = i.number("min_h", f.min_h);
    f.min_v = i.number("min_v", f.min_v);
    f.slope = i.number("slope", f.slope);
    f.l2 = i.number("l2", f.l2);
    cfg.initial.h0s = i.number("h0s", cfg.initial.h0s);
    i.finish();
  }

  {
    const bool needs_solver = cfg.kind == ExperimentKind::simulate || cfg.kind == ExperimentKind::sweep;
    Section s = root.child("solver");
    SolverConfig& c = cfg.solver;
    c.dt = needs_solver ? s.required_number("dt") : s.number("dt", c.dt);
    c.t_end = needs_solver ? s.required_number("t_end") : s.number("t_end", c.t_end);
    const std::string integ = s.string("integrator", integrator_name(c.integrator));
    if (integ == "if_rk4") c.integrator = Integrator::if_rk4;
    else if (integ == "imex_euler") c.integrator = Integrator::imex_euler;
    else throw ConfigError("config: solver.integrator must be \"if_rk4\" or \"imex_euler\"");
    c.cadence = s.integer("cadence", c.cadence);
    c.blowup_factor = s.number("blowup_factor", c.blowup_factor);
    c.bootstrap_constant = s.number("bootstrap_constant", c.bootstrap_constant);
    s.finish();
  }

  {
    const std::string mode = root.string("mode", mode_name(cfg.mode));
    if (mode == "direct") cfg.mode = RunMode::direct;
    else if (mode == "coupled_split") cfg.mode = RunMode::coupled_split;
    else throw ConfigError("config: mode must be \"direct\" or \"coupled_split\"");
  }

  {
    Section c = root.child("cutoff");
    cfg.cutoff.r = c.number("r", cfg.cutoff.r);
    cfg.cutoff.R = c.number("R", cfg.cutoff.R);
    cfg.cutoff.schedule_constant = c.number("schedule_constant", cfg.cutoff.schedule_constant);
    c.finish();
  }

  {
    Section l = root.child("linear");
    if (const json* fr = l.find("frequencies")) {
      if (!fr->is_array()) throw l.type_error("frequencies", "an array of [xi1, xi2, xi3]");
      for (const auto& x : *fr) {
        if (!x.is_array() || x.size() != 3) throw l.type_error("frequencies", "an array of [xi1, xi2, xi3]");
        Freq xi{};
        for (int a = 0; a < 3; ++a) {
          if (!x[a].is_number()) throw l.type_error("frequencies", "an array of [xi1, xi2, xi3]");
          xi[a] = x[a].get<double>();
        }
        cfg.linear.frequencies.push_back(xi);
      }
    }
    cfg.linear.random = l.integer("random", cfg.linear.random);
    cfg.linear.r = l.number("r", cfg.linear.r);
    cfg.linear.R = l.number("R", cfg.linear.R);
    l.finish();
  }

  {
    Section k = root.child("kernels");
    KernelsSpec& s = cfg.kernels;
    s.branches = k.strings("branches", s.branches);
    s.R = k.numbers("R", s.R);
    s.beta = k.number("beta", s.beta);
    s.theta_min = k.number("theta_min", s.theta_min);
    s.theta_max = k.number("theta_max", s.theta_max);
    s.per_decade = k.integer("per_decade", s.per_decade);
    s.window_decades = k.number("window_decades", s.window_decades);
    s.samples = k.integer("samples", s.samples);
    s.tau = k.number("tau", s.tau);
    s.tau_theta = k.number("tau_theta", s.tau_theta);
    s.tau_r2_min = k.number("tau_r2_min", s.tau_r2_min);
    s.tau_r2_max = k.number("tau_r2_max", s.tau_r2_max);
    s.tau_points = k.integer("tau_points", s.tau_points);
    s.tol = k.number("tol", s.tol);
    k.finish();
  }

  {
    Section st = root.child("strichartz");
    StrichartzSpec& s = cfg.strichartz;
    s.eps = st.numbers("eps", s.eps);
    s.alpha = st.numbers("alpha", s.alpha);
    s.p = st.numbers("p", s.p, true);
    Section pr = st.child("profile");
    s.profile.rho0 = pr.number("rho0", s.profile.rho0);
    s.profile.rho_width = pr.number("rho_width", s.profile.rho_width);
    s.profile.xi3_0 = pr.number("xi3_0", s.profile.xi3_0);
    s.profile.xi3_width = pr.number("xi3_width", s.profile.xi3_width);
    pr.finish();
    Section op = st.child("options");
    StrichartzOptions& o = s.options;
    o.r = op.number("r", o.r);
    o.R = op.number("R", o.R);
    o.branch = parse_branch(op.string("branch", branch_name(o.branch)));
    o.sign = op.integer("sign", o.sign);
    o.t_per_decade = op.integer("t_per_decade", o.t_per_decade);
    o.xi3_nodes = op.integer("xi3_nodes", o.xi3_nodes);
    o.x_samples = op.integer("x_samples", o.x_samples);
    o.panel_factor = op.number("panel_factor", o.panel_factor);
    o.damping_cut = op.number("damping_cut", o.damping_cut);
    op.finish();
    st.finish();
  }

  {
    Section sw = root.child("sweep");
    cfg.sweep.eps = sw.numbers("eps", cfg.sweep.eps);
    cfg.sweep.threshold_multiple = sw.number("threshold_multiple", cfg.sweep.threshold_multiple);
    cfg.sweep.small_data_constant = sw.number("small_data_constant", cfg.sweep.small_data_constant);
    cfg.sweep.max_dt_over_eps = sw.number("max_dt_over_eps", cfg.sweep.max_dt_over_eps);
    sw.finish();
  }

  {
    Section c = root.child("check");
    CheckSpec& s = cfg.check;
    s.suites = c.strings("suites", s.suites);
    s.trials = c.integer("trials", s.trials);
    s.states = c.integer("states", s.states);
    s.fields = c.integer("fields", s.fields);
    s.r = c.number("r", s.r);
    s.R = c.number("R", s.R);
    s.n_h = c.integer("n_h", s.n_h);
    s.n_v = c.integer("n_v", s.n_v);
    s.energy_tol = c.number("energy_tol", s.energy_tol);
    s.min_order = c.number("min_order", s.min_order);
    s.split_tol = c.number("split_tol", s.split_tol);
    c.finish();
  }

  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = kind_name(cfg.kind);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["grid"] = {{"n_h", cfg.grid.n_h},
               {"n_v", cfg.grid.n_v},
               {"box_h", cfg.grid.box_h},
               {"box_v", cfg.grid.box_v}};
  const ModelParams& p = cfg.model;
  json m;
  m["kind"] = p.kind == SystemKind::rotating ? "rotating" : "generic";
  m["eps"] = number_or_inf(p.eps);
  m["alpha"] = p.alpha;
  if (p.kind == SystemKind::generic) {
    m["nu"] = p.nu;
    m["nu_m"] = p.nu_m;
    m["mu"] = p.mu;
  }
  m["s"] = p.s;
  m["eta"] = p.eta;
  m["beta"] = p.beta;
  j["model"] = m;
  const RandomFieldSpec& f = cfg.initial.field;
  j["initial"] = {{"k_min", f.k_min}, {"k_max", number_or_inf(f.k_max)}, {"min_h", f.min_h},
                  {"min_v", f.min_v}, {"slope", f.slope},  {"l2", f.l2},
                  {"h0s", cfg.initial.h0s}};
  const SolverConfig& s = cfg.solver;
  j["solver"] = {{"dt", s.dt},
                 {"t_end", s.t_end},
                 {"integrator", integrator_name(s.integrator)},
                 {"cadence", s.cadence},
                 {"blowup_factor", s.blowup_factor},
                 {"bootstrap_constant", s.bootstrap_constant}};
  j["mode"] = mode_name(cfg.mode);
  j["cutoff"] = {{"r", cfg.cutoff.r},
                 {"R", cfg.cutoff.R},
                 {"schedule_constant", cfg.cutoff.schedule_constant}};
  json freqs = json::array();
  for (const Freq& xi : cfg.linear.frequencies) freqs.push_back({xi[0], xi[1], xi[2]});
  j["linear"] = {{"frequencies", freqs},
                 {"random", cfg.linear.random},
                 {"r", cfg.linear.r},
                 {"R", cfg.linear.R}};
  const KernelsSpec& k = cfg.kernels;
  j["kernels"] = {{"branches", k.branches},     {"R", k.R},
                  {"beta", k.beta},             {"theta_min", k.theta_min},
                  {"theta_max", k.theta_max},   {"per_decade", k.per_decade},
                  {"window_decades", k.window_decades}, {"samples", k.samples},
                  {"tau", k.tau},               {"tau_theta", k.tau_theta},
                  {"tau_r2_min", k.tau_r2_min}, {"tau_r2_max", k.tau_r2_max},
                  {"tau_points", k.tau_points}, {"tol", k.tol}};
  const StrichartzSpec& st = cfg.strichartz;
  const StrichartzOptions& o = st.options;
  j["strichartz"] = {
      {"eps", st.eps},
      {"alpha", st.alpha},
      {"p", numbers_or_inf(st.p)},
      {"profile",
       {{"rho0", st.profile.rho0},
        {"rho_width", st.profile.rho_width},
        {"xi3_0", st.profile.xi3_0},
        {"xi3_width", st.profile.xi3_width}}},
      {"options",
       {{"r", o.r},
        {"R", o.R},
        {"branch", branch_name(o.branch)},
        {"sign", o.sign},
        {"t_per_decade", o.t_per_decade},
        {"xi3_nodes", o.xi3_nodes},
        {"x_samples", o.x_samples},
        {"panel_factor", o.panel_factor},
        {"damping_cut", o.damping_cut}}}};
  j["sweep"] = {{"eps", cfg.sweep.eps},
                {"threshold_multiple", cfg.sweep.threshold_multiple},
                {"small_data_constant", cfg.sweep.small_data_constant},
                {"max_dt_over_eps", cfg.sweep.max_dt_over_eps}};
  const CheckSpec& c = cfg.check;
  j["check"] = {{"suites", c.suites},     {"trials", c.trials},
                {"states", c.states},     {"fields", c.fields},
                {"r", c.r},               {"R", c.R},
                {"n_h", c.n_h},           {"n_v", c.n_v},
                {"energy_tol", c.energy_tol}, {"min_order", c.min_order},
                {"split_tol", c.split_tol}};
  return j;
}

// ---------------------------------------------------------------- output

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("git_blob_hash: EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("git_blob_hash: SHA-1 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> columns)
    : path_(path), tmp_(path.string() + ".tmp"), columns_(std::move(columns)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  file_ = std::fopen(tmp_.string().c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot open " + tmp_.string() + " for writing");
  row(columns_);
}

CsvWriter::~CsvWriter() {
  if (file_) {
    std::fclose(file_);
    std::error_code ec;
    fs::remove(tmp_, ec);
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (!file_) throw std::logic_error("CsvWriter: row after close");
  if (cells.size() != columns_.size())
    throw std::logic_error("CsvWriter: " + path_.filename().string() + ": row has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(columns_.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(cells[i].c_str(), file_);
  }
  std::fputc('\n', file_);
}

void CsvWriter::close() {
  if (!file_) return;
  const bool ok = std::fflush(file_) == 0 && std::ferror(file_) == 0;
  std::fclose(file_);
  file_ = nullptr;
  if (!ok) throw std::runtime_error("write failed: " + tmp_.string());
  fs::rename(tmp_, path_);
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  json j;
  j["config"] = m.config;
  j["config_hash"] = m.config_hash;
  j["derived"] = m.derived;
  j["status"] = m.status;
  j["exit_code"] = m.exit_code;
  j["wall_seconds"] = m.seconds;
  json arts = json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"file", a.file}, {"columns", a.columns}});
  j["artifacts"] = arts;
  j["warnings"] = m.warnings;
  fs::create_directories(dir);
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, dir / "manifest.json");
}

// ---------------------------------------------------------------- running

StateVector initial_state(const ExperimentConfig& cfg) {
  const Grid g = make_grid(cfg.grid);
  StateVector U = random_state(g, cfg.initial.field, cfg.seed);
  if (cfg.initial.h0s > 0.0) {
    const double n = h0s_norm(U, cfg.model.s);
    if (!(n > 0.0))
      throw ConfigError("config: initial data is zero on this grid; widen initial.k_min..k_max");
    U = (cfg.initial.h0s / n) * U;
  }
  return U;
}

RunManifest run_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                           const std::string& config_text) {
  cfg.validate();
  const auto t0 = Clock::now();
  RunManifest m;
  m.config = to_json(cfg);
  m.config_hash = git_blob_hash(config_text);
  fs::create_directories(dir);
  try {
    switch (cfg.kind) {
      case ExperimentKind::simulate:
        simulate_into(cfg, dir, m);
        break;
      case ExperimentKind::linear:
        run_linear(cfg, dir, m);
        break;
      case ExperimentKind::kernels:
        run_kernels(cfg, dir, m);
        break;
      case ExperimentKind::strichartz:
        run_strichartz(cfg, dir, m);
        break;
      case ExperimentKind::check:
        run_check(cfg, dir, m);
        break;
      case ExperimentKind::sweep: {
        const SweepReport rep = run_sweep(cfg, dir);
        json entries = json::array();
        for (const auto& e : rep.entries) {
          json je = {{"eps", e.eps}, {"dt", e.dt}, {"status", e.status}, {"ratio", e.ratio}};
          if (!e.error.empty()) je["error"] = e.error;
          entries.push_back(je);
        }
        m.derived["entries"] = entries;
        m.derived["data_h0s"] = rep.data_h0s;
        m.derived["small_data_threshold"] = rep.threshold;
        m.derived["ratio_non_increasing"] = rep.ratio_non_increasing;
        m.derived["smallest_completed"] = rep.smallest_completed;
        m.derived["fitted_constant"] = rep.fitted_constant;
        m.derived["agreement_factor"] = rep.agreement_factor;
        for (std::size_t i = 0; i < rep.entries.size(); ++i)
          m.artifacts.push_back({"eps_" + std::to_string(i) + "/diagnostics.csv",
                                 kDiagnosticsColumns});
        m.artifacts.push_back({"sweep.csv", {"eps", "r", "R", "status", "blowup", "t_reached",
                                             "sup_tilde_h0s", "ratio", "bootstrap_threshold",
                                             "high_h0s", "y_norm"}});
        if (!rep.smallest_completed) {
          m.status = "smallest_eps_failed";
          m.exit_code = kExitBlowup;
        }
        break;
      }
    }
  } catch (const NumericalError& e) {
    m.status = std::string("numerical_failure: ") + e.what();
    m.exit_code = kExitBlowup;
  } catch (const InvariantError& e) {
    m.status = std::string("numerical_failure: ") + e.what();
    m.exit_code = kExitBlowup;
  }
  m.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(dir, m);
  return m;
}

SweepReport run_sweep(const ExperimentConfig& base, const fs::path& dir) {
  base.validate();
  SweepReport rep;
  const double alpha = base.model.alpha;
  double top = 0.0;
  for (double e : base.sweep.eps) top = std::max(top, std::pow(e, alpha));
  rep.threshold = base.sweep.small_data_constant * top;
  rep.data_h0s = base.sweep.threshold_multiple > 0 ? base.sweep.threshold_multiple * rep.threshold
                                                   : base.initial.h0s;

  CsvWriter table(dir / "sweep.csv", {"eps", "dt", "r", "R", "status", "blowup", "t_reached",
                                      "sup_tilde_h0s", "ratio", "bootstrap_threshold",
                                      "high_h0s", "y_norm"});
  for (std::size_t i = 0; i < base.sweep.eps.size(); ++i) {
    SweepEntry entry;
    entry.eps = base.sweep.eps[i];
    ExperimentConfig cfg = base;
    cfg.kind = ExperimentKind::simulate;
    cfg.mode = RunMode::coupled_split;
    cfg.model = with_eps(base.model, entry.eps);
    cfg.initial.h0s = rep.data_h0s;
    if (base.sweep.max_dt_over_eps > 0) {
      const double cap = base.sweep.max_dt_over_eps * entry.eps;
      const double k = std::ceil(base.solver.dt / cap * (1 - 1e-12));
      if (k > 1) {
        cfg.solver.dt = base.solver.dt / k;
        cfg.solver.cadence = base.solver.cadence * static_cast<int>(k);
      }
    }
    entry.dt = cfg.solver.dt;
    const fs::path sub = dir / ("eps_" + std::to_string(i));
    RunManifest m;
    const auto t0 = Clock::now();
    try {
      cfg.validate();
      m.config = to_json(cfg);
      m.config_hash = git_blob_hash(m.config.dump());
      const SimulateSummary s = simulate_into(cfg, sub, m);
      entry.r = s.r;
      entry.R = s.R;
      entry.status = s.result.status;
      entry.blowup = s.result.blowup;
      entry.t_reached = s.result.t_reached;
      entry.sup_tilde_h0s = s.result.sup_tilde_h0s;
      entry.ratio = s.result.sup_tilde_h0s / std::pow(entry.eps, alpha);
      entry.bootstrap_threshold = s.result.bootstrap_threshold;
      entry.high_h0s = s.high_h0s;
      entry.y_norm = s.y;
    } catch (const std::exception& e) {
      entry.status = "error";
      entry.error = e.what();
      entry.blowup = dynamic_cast<const NumericalError*>(&e) != nullptr;
      m.status = std::string("error: ") + e.what();
      m.exit_code = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e)
                        ? kExitConfig
                        : kExitBlowup;
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_manifest(sub, m);
    table.row(std::vector<std::string>{
        format_number(entry.eps), format_number(entry.dt), format_number(entry.r),
        format_number(entry.R), entry.status,
        entry.blowup ? "1" : "0", format_number(entry.t_reached),
        format_number(entry.sup_tilde_h0s), format_number(entry.ratio),
        format_number(entry.bootstrap_threshold), format_number(entry.high_h0s),
        format_number(entry.y_norm)});
    rep.entries.push_back(entry);
  }
  table.close();

  // Summaries over eps in decreasing order.
  std::vector<const SweepEntry*> order;
  for (const auto& e : rep.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const SweepEntry* a, const SweepEntry* b) { return a->eps > b->eps; });
  auto completed = [](const SweepEntry* e) { return e->status == "ok"; };
  rep.smallest_completed = completed(order.back());
  rep.ratio_non_increasing = true;
  const SweepEntry* prev = nullptr;
  for (const SweepEntry* e : order) {
    if (!completed(e)) continue;
    if (prev && e->ratio > prev->ratio * (1 + 1e-12)) rep.ratio_non_increasing = false;
    prev = e;
  }
  if (order.size() >= 2) {
    const SweepEntry* a = order[order.size() - 2];
    const SweepEntry* b = order.back();
    if (completed(a) && completed(b) && a->ratio > 0 && b->ratio > 0) {
      rep.fitted_constant = std::max(a->ratio, b->ratio);
      rep.agreement_factor = std::max(a->ratio, b->ratio) / std::min(a->ratio, b->ratio);
    }
  } else if (completed(order.back())) {
    rep.fitted_constant = order.back()->ratio;
    rep.agreement_factor = 1.0;
  }
  return rep;
}

}  // namespace rotmhd
