#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"
#include "rotmhd/linear.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/random_field.hpp"
#include "rotmhd/solver.hpp"

using namespace rotmhd;

namespace {

// u . grad w evaluated pointwise from spectrally exact derivatives.
PhysicalField advect_physical(const SpectralField& a, const SpectralField& w) {
  const Grid& g = a.grid;
  const PhysicalField ap = inverse_transform(a);
  PhysicalField out(g);
  for (int j = 0; j < 3; ++j) {
    const PhysicalField dw = inverse_transform(derivative(w, j));
    for (int i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < g.size(); ++k) out.comp[i][k] += ap.comp[j][k] * dw.comp[i][k];
  }
  return out;
}

double phys_max_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < a.comp[c].size(); ++k)
      m = std::max(m, std::abs(a.comp[c][k] - b.comp[c][k]));
  return m;
}

// One real Fourier pair +-k with polarisation orthogonal to k: every quadratic
// term vanishes identically.
StateVector single_wavevector_state(const Grid& g, int k1, int k2, int k3) {
  StateVector U(g);
  const std::size_t i = g.index((k1 + g.n_h()) % g.n_h(), (k2 + g.n_h()) % g.n_h(),
                                (k3 + g.n_v()) % g.n_v());
  const auto xi = g.frequency(i);
  Eigen::Vector3cd u(cplx(1.0, 0.5), cplx(-0.3, 0.2), cplx(0.7, -1.0));
  Eigen::Vector3cd b(cplx(0.2, 0.1), cplx(0.9, 0.0), cplx(-0.4, 0.6));
  const Eigen::Vector3d k(xi[0], xi[1], xi[2]);
  u -= k * (k.cast<cplx>().dot(u)) / k.squaredNorm();
  b -= k * (k.cast<cplx>().dot(b)) / k.squaredNorm();
  const double scale = static_cast<double>(g.size());
  for (int c = 0; c < 3; ++c) {
    U.u.comp[c][i] = scale * u(c);
    U.b.comp[c][i] = scale * b(c);
    U.u.comp[c][g.mirror(i)] = scale * std::conj(u(c));
    U.b.comp[c][g.mirror(i)] = scale * std::conj(b(c));
  }
  return U;
}

}  // namespace

TEST_CASE("nonlinear tendency: zero state and pointwise products") {
  const Grid g(8, 8, 2 * std::numbers::pi, 2 * std::numbers::pi);
  CHECK(l2_norm(nonlinear_tendency(StateVector(g))) == 0.0);

  // Components |k_i| <= 1 keep every product inside the retained box.
  const StateVector U = random_state(g, {0.5, 1.5}, 21);
  const StateVector Q = quadratic_terms(U);
  PhysicalField ref_u = advect_physical(U.u, U.u);
  const PhysicalField bb = advect_physical(U.b, U.b);
  PhysicalField ref_b = advect_physical(U.u, U.b);
  const PhysicalField bu = advect_physical(U.b, U.u);
  for (int c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < g.size(); ++k) {
      ref_u.comp[c][k] -= bb.comp[c][k];
      ref_b.comp[c][k] -= bu.comp[c][k];
    }
  const PhysicalField qu = inverse_transform(Q.u);
  const PhysicalField qb = inverse_transform(Q.b);
  CHECK(phys_max_diff(qu, ref_u) < 1e-12);
  CHECK(phys_max_diff(qb, ref_b) < 1e-12);

  const StateVector N = nonlinear_tendency(U);
  CHECK(divergence_defect(N.u) < 1e-10);
  CHECK(divergence_defect(N.b) < 1e-10);
}

TEST_CASE("energy identity of the full right-hand side") {
  const Grid g(16, 16, 8.0, 6.0);
  const ModelParams p = ModelParams::rotating(0.3, 1.0);
  const StateVector U = random_state(g, {0.5, 6.0}, 4);
  const double lhs = inner_product(full_rhs(U, p), U);
  const double rhs = -dissipation_rate(U, p);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
  CHECK(std::abs(inner_product(nonlinear_tendency(U), U)) < 1e-10 * std::abs(rhs));

  const ModelParams q = ModelParams::generic(0.3, 0.05, 0.2, 0.7);
  CHECK(std::abs(inner_product(full_rhs(U, q), U) + dissipation_rate(U, q)) <
        1e-10 * dissipation_rate(U, q));
}

TEST_CASE("linear right-hand side matches the assembled symbol") {
  const Grid g(8, 8, 5.0, 7.0);
  const ModelParams p = ModelParams::generic(0.4, 0.1, 0.3, 0.6);
  const StateVector U = random_state(g, {0.5, 5.0}, 8);
  const StateVector L = linear_rhs(U, p);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Freq xi = g.op_frequency(i);
    if (xi == Freq{0, 0, 0}) continue;
    Vec6 v;
    const auto m = U.mode(i);
    for (int c = 0; c < 6; ++c) v(c) = m[c];
    const Vec6 w = assemble_symbol(xi, p) * v;
    const auto got = L.mode(i);
    for (int c = 0; c < 6; ++c) err = std::max(err, std::abs(got[c] - w(c)));
  }
  CHECK(err < 1e-12 * l2_norm(U));
}

TEST_CASE("a step of a single-wavevector state is the exact linear flow") {
  const Grid g(8, 8, 6.0, 4.0);
  const ModelParams p = ModelParams::rotating(0.25, 1.0);
  const StateVector U = single_wavevector_state(g, 1, 2, 1);
  CHECK(l2_norm(nonlinear_tendency(U)) < 1e-10 * l2_norm(U));
  SolverConfig cfg;
  cfg.dt = 0.05;
  const StepOutput out = step(U, cfg.dt, cfg, p);
  const StateVector ref = propagate_exact(U, cfg.dt, p);
  CHECK(l2_norm(out.next - ref) < 1e-10 * l2_norm(ref));
}

TEST_CASE("geostrophic shear decays by the horizontal viscosity only") {
  const Grid g(8, 8, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const ModelParams p = ModelParams::rotating(0.1, 1.0);
  StateVector U(g);
  const std::size_t i = g.index(1, 0, 0);
  U.u.comp[1][i] = cplx(0.0, -0.5 * g.size());
  U.u.comp[1][g.mirror(i)] = cplx(0.0, 0.5 * g.size());
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  const RunResult res = run(U, cfg, p);
  CHECK(res.status == "ok");
  const double expected = std::exp(-p.nu * 1.0) * l2_norm(U);
  CHECK(std::abs(l2_norm(res.final_state) - expected) < 1e-12 * expected);
  CHECK(std::abs(res.records.back().energy_residual) < 1e-10);
}

TEST_CASE("IF-RK4 converges at fourth order, IMEX Euler at first") {
  const Grid g(16, 16, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const ModelParams p = ModelParams::rotating(0.5, 1.0);
  const StateVector U = 0.6 * random_state(g, {0.5, 4.0}, 3);
  auto final_state = [&](double dt, Integrator integ) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 0.4;
    cfg.integrator = integ;
    cfg.cadence = 1000;
    return run(U, cfg, p).final_state;
  };
  const StateVector ref = final_state(0.4 / 128, Integrator::if_rk4);
  const double e1 = l2_norm(final_state(0.4 / 8, Integrator::if_rk4) - ref);
  const double e2 = l2_norm(final_state(0.4 / 16, Integrator::if_rk4) - ref);
  const double e3 = l2_norm(final_state(0.4 / 32, Integrator::if_rk4) - ref);
  CHECK(std::log2(e1 / e2) > 3.5);
  CHECK(std::log2(e2 / e3) > 3.5);

  const double f1 = l2_norm(final_state(0.4 / 16, Integrator::imex_euler) - ref);
  const double f2 = l2_norm(final_state(0.4 / 32, Integrator::imex_euler) - ref);
  CHECK(std::log2(f1 / f2) > 0.8);
  CHECK(std::log2(f1 / f2) < 1.3);
}

TEST_CASE("coupled split run reproduces the direct run") {
  const Grid g(16, 16, 16.0, 16.0);
  const ModelParams p = ModelParams::rotating(0.3, 1.0);
  const StateVector U = 0.3 * random_state(g, {0.3, 5.0}, 12);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.t_end = 0.4;
  cfg.cutoff = CutoffBand{0.8, 2.0};
  const RunResult direct = run(U, cfg, p);
  const RunResult split = run(U, cfg, p, RunMode::coupled_split);
  REQUIRE(split.final_low);
  REQUIRE(split.final_high);
  CHECK(l2_norm(split.final_state - direct.final_state) < 1e-11 * l2_norm(direct.final_state));
  CHECK(l2_norm(*split.final_low + *split.final_high - split.final_state) <
        1e-13 * l2_norm(split.final_state));
  CHECK(split.records.back().ltilde_inf >= split.records.front().ltilde_inf);
  CHECK(split.records.back().ltilde_2 > 0.0);
  CHECK(std::abs(split.records.back().energy_residual) < 1e-6 * split.records.front().energy);

  SolverConfig bad = cfg;
  bad.cutoff.reset();
  CHECK_THROWS_AS(run(U, bad, p, RunMode::coupled_split), ConfigError);
}

TEST_CASE("blow-up detection and configuration errors") {
  const Grid g(8, 8, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const ModelParams p = ModelParams::rotating(0.5, 1.0);
  const StateVector U = 500.0 * random_state(g, {0.5, 3.0}, 5);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 50.0;
  cfg.blowup_factor = 10.0;
  const RunResult res = run(U, cfg, p);
  CHECK(res.blowup);
  CHECK(res.status == "blowup");
  CHECK(res.t_reached < cfg.t_end);

  SolverConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(run(U, bad, p), ConfigError);
  StateVector nondiv(g);
  nondiv.u.comp[0][g.index(1, 0, 0)] = 1.0;
  nondiv.u.comp[0][g.mirror(g.index(1, 0, 0))] = 1.0;
  CHECK_THROWS_AS(run(nondiv, SolverConfig{}, p), InvariantError);
}

TEST_CASE("twin run: zero perturbation and the Gronwall envelope") {
  const Grid g(8, 8, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const ModelParams p = ModelParams::rotating(0.5, 1.0);
  const StateVector U = random_state(g, {0.5, 3.0}, 6);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.t_end = 0.4;
  cfg.cadence = 5;
  const TwinRunReport zero = twin_run_divergence(U, StateVector(g), cfg, p);
  CHECK(zero.complete);
  for (double d : zero.delta) CHECK(d == 0.0);
  CHECK(zero.fitted_C == 0.0);

  const StateVector dU = 1e-3 * random_state(g, {0.5, 3.0}, 7);
  const TwinRunReport rep = twin_run_divergence(U, dU, cfg, p);
  REQUIRE(rep.t.size() == 5);
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    CHECK(rep.delta[k] <= rep.envelope[k] * (1 + 1e-12));
    if (k > 0) CHECK(rep.f_integral[k] > rep.f_integral[k - 1]);
  }
}
