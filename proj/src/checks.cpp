#include "rotmhd/checks.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/littlewood_paley.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/random_field.hpp"

namespace rotmhd {

namespace {

using Clock = std::chrono::steady_clock;

// max that keeps a NaN, so a broken metric fails instead of vanishing
double worst(double acc, double v) { return std::isnan(acc) || std::isnan(v) ? NAN : std::max(acc, v); }

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

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

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.comp)
    for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

void require_trials(int n, const char* where) {
  if (n < 1) throw ParameterError(std::string(where) + ": need at least one trial");
}

}  // namespace

bool CheckSuite::pass() const {
  return std::all_of(metrics.begin(), metrics.end(), [](const CheckMetric& m) { return m.pass; });
}

void CheckSuite::add(const std::string& metric, double value, double threshold, bool upper) {
  const bool ok = std::isfinite(value) && (upper ? value <= threshold : value >= threshold);
  metrics.push_back({metric, value, threshold, upper, ok});
}

CheckSuite check_eigen_structure(int trials, double r, double R, double eps, double alpha,
                                 std::uint64_t seed) {
  require_trials(trials, "check_eigen_structure");
  const auto t0 = Clock::now();
  const ModelParams p = ModelParams::rotating(eps, alpha);
  p.validate();
  std::mt19937_64 rng(seed);
  double lam_err = 0.0, vec_err = 0.0, det_err = 0.0, cramer_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Freq xi = random_band_freq(rng, r, R);
    const Mat6 M = assemble_symbol(xi, p);
    Eigen::ComplexEigenSolver<Mat6> solver(M);
    const auto& num_lam = solver.eigenvalues();
    const auto lam = eigenvalues(xi, p);
    const auto W = eigenvectors(xi, p);
    double radius = 0.0;
    for (const auto& l : lam) radius = std::max(radius, std::abs(l));
    for (int i = 0; i < 6; ++i) {
      int best = 0;
      for (int j = 1; j < 6; ++j)
        if (std::abs(num_lam(j) - lam[i]) < std::abs(num_lam(best) - lam[i])) best = j;
      lam_err = worst(lam_err, std::abs(num_lam(best) - lam[i]) / radius);
      const Vec6 v = solver.eigenvectors().col(best);
      const Vec6 off = W[i] - v * (v.dot(W[i]) / v.squaredNorm());
      vec_err = worst(vec_err, off.stableNorm() / W[i].stableNorm());
    }
    const double det = cramer_det_closed_form(xi);
    det_err = worst(det_err, std::abs(std::abs(cramer_matrix(xi, p).determinant()) - det) / det);
    const Vec6 U0 = random_solenoidal(rng, xi);
    const auto C = cramer_coefficients(U0, xi, p);
    Vec6 rec = Vec6::Zero();
    for (int i = 0; i < 4; ++i) rec += C[i] * W[i + 2];
    cramer_err = worst(cramer_err, (rec - U0).norm() / U0.norm());
  }
  CheckSuite s{"eigen", {}, 0.0};
  s.add("eigenvalue_rel_error", lam_err, 1e-10);
  s.add("eigenvector_rel_error", vec_err, 1e-10);
  s.add("det_rel_error", det_err, 1e-10);
  s.add("cramer_residual", cramer_err, 1e-10);
  s.seconds = since(t0);
  return s;
}

CheckSuite check_propagator(int trials, double r, double R, double eps, double alpha,
                            std::uint64_t seed) {
  require_trials(trials, "check_propagator");
  const auto t0 = Clock::now();
  const ModelParams p = ModelParams::rotating(eps, alpha);
  p.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, 10.0 / eps);
  double prop_err = 0.0, decay_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Freq xi = random_band_freq(rng, r, R);
    const double time = ut(rng);
    const Vec6 U0 = random_solenoidal(rng, xi);
    const Vec6 a = eigen_propagator(xi, p, time) * U0;
    const Vec6 b = expm_oracle(assemble_symbol(xi, p), time) * U0;
    const double decay = std::exp(-p.nu * (xi[0] * xi[0] + xi[1] * xi[1]) * time);
    const double ref = std::max(decay, 1e-250) * U0.norm();  // absolute once the decay underflows
    prop_err = worst(prop_err, (a - b).stableNorm() / std::max(b.stableNorm(), ref));
    decay_err = worst(decay_err, std::abs(a.stableNorm() - decay * U0.norm()) / ref);
  }

  // The grid route: every mode of a small box against the oracle.
  const Grid g(8, 8, 2 * std::numbers::pi, 2 * std::numbers::pi);
  RandomFieldSpec spec;
  spec.k_min = r;
  spec.k_max = R;
  const StateVector U = random_state(g, spec, seed);
  const double time = ut(rng);
  const StateVector V = propagate_exact(U, time, p);
  double grid_err = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    Vec6 u0;
    for (int c = 0; c < 3; ++c) {
      u0(c) = U.u.comp[c][i];
      u0(c + 3) = U.b.comp[c][i];
    }
    const Freq xi = g.op_frequency(i);
    if (u0.norm() == 0.0 || xi == Freq{0.0, 0.0, 0.0}) continue;
    const Vec6 ref = expm_oracle(assemble_symbol(xi, p), time) * u0;
    Vec6 got;
    for (int c = 0; c < 3; ++c) {
      got(c) = V.u.comp[c][i];
      got(c + 3) = V.b.comp[c][i];
    }
    grid_err = worst(grid_err, (got - ref).stableNorm() / std::max(ref.stableNorm(), 1e-250 * u0.norm()));
  }

  CheckSuite s{"propagator", {}, 0.0};
  s.add("propagator_rel_error", prop_err, 1e-9);
  s.add("decay_law_rel_error", decay_err, 1e-9);
  s.add("grid_rel_error", grid_err, 1e-9);
  s.seconds = since(t0);
  return s;
}

CheckSuite check_cancellations(int states, int n_h, int n_v, std::uint64_t seed) {
  require_trials(states, "check_cancellations");
  const auto t0 = Clock::now();
  const Grid g(n_h, n_v, 2 * std::numbers::pi, 2 * std::numbers::pi);
  RandomFieldSpec spec;
  spec.k_min = 0.5;
  double adv = 0.0, mag = 0.0, cor = 0.0, cpl = 0.0;
  for (int k = 0; k < states; ++k) {
    const StateVector U = random_state(g, spec, seed + static_cast<std::uint64_t>(k));
    const StateVector V = random_state(g, spec, seed + 0x9e3779b97f4a7c15ULL + k);
    const SpectralField& u = U.u;
    const SpectralField& b = U.b;
    const SpectralField& v = V.u;
    auto grad_norm = [](const SpectralField& f) {
      double s2 = 0.0;
      for (int a = 0; a < 3; ++a) s2 += std::pow(l2_norm(derivative(f, a)), 2);
      return std::sqrt(s2);
    };
    const double u_inf = aniso_lebesgue_norm(u, INFINITY, INFINITY);
    const double b_inf = aniso_lebesgue_norm(b, INFINITY, INFINITY);

    adv = worst(adv, std::abs(inner_product(advection(u, v), v)) /
                            (u_inf * grad_norm(v) * l2_norm(v)));
    const double m = inner_product(advection(b, u), b) + inner_product(advection(b, b), u);
    mag = worst(mag, std::abs(m) / (b_inf * (grad_norm(u) * l2_norm(b) +
                                                grad_norm(b) * l2_norm(u))));
    cor = worst(cor, std::abs(inner_product(rotate_e3(u), u)) / std::pow(l2_norm(u), 2));
    const SpectralField d3b = derivative(b, 2), d3u = derivative(u, 2);
    const double c = inner_product(d3b, u) + inner_product(d3u, b);
    cpl = worst(cpl, std::abs(c) / (l2_norm(d3b) * l2_norm(u) + l2_norm(d3u) * l2_norm(b)));
  }
  CheckSuite s{"cancellation", {}, 0.0};
  s.add("advection", adv, 1e-10);
  s.add("magnetic_pair", mag, 1e-10);
  s.add("rotation", cor, 1e-10);
  s.add("coupling_pair", cpl, 1e-10);
  s.seconds = since(t0);
  return s;
}

CheckSuite check_littlewood_paley(int fields, double s, std::uint64_t seed) {
  require_trials(fields, "check_littlewood_paley");
  const auto t0 = Clock::now();
  double recon = 0.0, disjoint = 0.0, bony = 0.0;
  double ratio_min = INFINITY, ratio_max = 0.0;
  for (int n : {16, 24, 32}) {
    const Grid g(n, n, 2 * std::numbers::pi, 2 * std::numbers::pi);
    for (int f = 0; f < fields; ++f) {
      RandomFieldSpec spec;
      spec.k_min = 0.5;
      spec.slope = -4.0 + f;  // flatter spectra put more weight on high blocks
      const StateVector U = random_state(g, spec, seed + 31 * n + f);
      const double ratio = dyadic_sobolev_norm(U.u, 0.0, s) / h0s_norm(U.u, s);
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = worst(ratio_max, ratio);
      if (n != 16) continue;

      const DyadicLadder L = build_ladder(U.u);
      recon = worst(recon, l2_norm(L.reconstruct() - U.u) / l2_norm(U.u));
      const double scale = max_abs(U.u);
      for (Direction d : {Direction::vertical, Direction::horizontal}) {
        const int top = max_block(g, d);
        for (int q = -1; q <= top; ++q)
          for (int p = q + 2; p <= top; ++p)
            disjoint = worst(disjoint,
                                max_abs(dyadic_block(dyadic_block(U.u, q, d), p, d)) / scale);
      }
      for (int i = 0; i < 3; ++i) {
        const BonyParts P = bony_decompose(U.u, i, U.b, (i + 1) % 3);
        double err = 0.0, top = 0.0;
        for (std::size_t k = 0; k < P.product.size(); ++k) {
          err = std::max(err, std::abs(P.t_ab[k] + P.t_ba[k] + P.remainder[k] - P.product[k]));
          top = std::max(top, std::abs(P.product[k]));
        }
        bony = worst(bony, err / top);
      }
    }
  }
  CheckSuite r{"littlewood_paley", {}, 0.0};
  r.add("reconstruction", recon, 1e-10);
  r.add("disjointness", disjoint, 1e-10);
  r.add("norm_ratio_band", ratio_max / ratio_min, 8.0);
  r.add("bony_reconstruction", bony, 1e-9);
  r.seconds = since(t0);
  return r;
}

CheckSuite check_energy_identity(const StateVector& U0, const SolverConfig& cfg,
                                 const ModelParams& p, const EnergyCheckOptions& opt) {
  if (opt.dt.size() < 2) throw ParameterError("check_energy_identity: need at least two dt");
  const auto t0 = Clock::now();
  std::vector<double> res;
  double at_target = NAN, e0 = 0.0;
  for (double dt : opt.dt) {
    SolverConfig c = cfg;
    c.dt = dt;
    c.cadence = std::max(1, static_cast<int>(std::llround(cfg.t_end / dt)));
    const RunResult run_result = run(U0, c, p);
    if (run_result.blowup) throw NumericalError("check_energy_identity: run blew up at dt " +
                                                std::to_string(dt));
    e0 = run_result.records.front().energy;
    res.push_back(std::abs(run_result.records.back().energy_residual));
    if (dt == opt.dt_target) at_target = res.back();
  }
  CheckSuite s{"energy", {}, 0.0};
  s.add("residual_over_energy", at_target / e0, opt.energy_tol);
  double order = INFINITY;
  for (std::size_t i = 0; i + 1 < res.size(); ++i)
    order = std::min(order, std::log(res[i] / res[i + 1]) / std::log(opt.dt[i] / opt.dt[i + 1]));
  s.add("min_order", order, opt.min_order, false);
  s.seconds = since(t0);
  return s;
}

CheckSuite check_split_consistency(const StateVector& U0, const SolverConfig& cfg,
                                   const ModelParams& p, double tol) {
  const auto t0 = Clock::now();
  const RunResult direct = run(U0, cfg, p);
  const RunResult split = run(U0, cfg, p, RunMode::coupled_split);
  if (direct.blowup || split.blowup)
    throw NumericalError("check_split_consistency: a run blew up");
  const double rel = h0s_norm(split.final_state - direct.final_state, p.s) /
                     h0s_norm(direct.final_state, p.s);
  CheckSuite s{"split", {}, 0.0};
  s.add("h0s_rel_difference", rel, tol);
  s.seconds = since(t0);
  return s;
}

}  // namespace rotmhd
