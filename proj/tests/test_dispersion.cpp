#include <doctest.h>

#include <cmath>
#include <random>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/dispersion.hpp"
#include "rotmhd/errors.hpp"

using namespace rotmhd;

namespace {

Freq sample_band(std::mt19937_64& rng, double r, double R) {
  std::uniform_real_distribution<double> u(-2 * R, 2 * R);
  for (;;) {
    Freq xi{u(rng), u(rng), u(rng)};
    if (in_band(xi, 0.5 * r, 2 * R)) return xi;
  }
}

Freq shift2(Freq xi, double h) {
  xi[1] += h;
  return xi;
}

}  // namespace

TEST_CASE("phase slopes match finite differences at second order") {
  std::mt19937_64 rng(17);
  for (Branch b : {Branch::A, Branch::B}) {
    for (int n = 0; n < 50; ++n) {
      const Freq xi = sample_band(rng, 0.25, 4.0);
      auto fd1 = [&](double h) {
        return -(phase(b, shift2(xi, h)) - phase(b, shift2(xi, -h))) / (2 * h);
      };
      auto fd2 = [&](double h) {
        return (phase_slope(b, shift2(xi, h)) - phase_slope(b, shift2(xi, -h))) / (2 * h);
      };
      const double g = phase_slope(b, xi);
      const double dg = phase_slope_derivative(b, xi);
      const double e1 = std::abs(fd1(1e-3) - g), e2 = std::abs(fd1(5e-4) - g);
      const double d1 = std::abs(fd2(1e-3) - dg), d2 = std::abs(fd2(5e-4) - dg);
      const double scale = std::abs(g) + 1e-3;
      CHECK(e2 < 1e-5 * scale + 1e-9);
      if (e1 > 1e-10) CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
      CHECK(d2 < 1e-5 * (std::abs(dg) + 1e-3) + 1e-9);
      if (d1 > 1e-10) CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.05));

      // Second difference of Gamma in xi_2.
      const double h = 1e-3;
      const double sd = (phase(b, shift2(xi, h)) - 2 * phase(b, xi) + phase(b, shift2(xi, -h))) / (h * h);
      CHECK(std::abs(-sd - dg) < 1e-4 * (std::abs(dg) + 1.0));

      const double rho = std::hypot(xi[0], xi[1]);
      const double dr = (phase(b, {rho + h, 0, xi[2]}) - phase(b, {rho - h, 0, xi[2]})) / (2 * h);
      CHECK(std::abs(dr - radial_phase_slope(b, rho, xi[2])) < 1e-5 * (std::abs(dr) + 1e-3));
    }
  }
  std::mt19937_64 r2(3);
  for (int n = 0; n < 20; ++n) {
    const Freq xi = sample_band(r2, 0.25, 4.0);
    CHECK(phase(Branch::A, xi) * phase(Branch::B, xi) ==
          doctest::Approx(xi[2] * xi[2]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(phase(Branch::A, {0, 0, 0}), DegenerateModeError);
}

TEST_CASE("empirical constants of the phase bounds are finite") {
  for (Branch b : {Branch::A, Branch::B}) {
    const PhaseBoundConstants c = phase_bound_constants(b, 0.25, 4.0, 1.0, 2000, 5);
    CHECK(c.samples == 2000);
    CHECK(std::isfinite(c.lower));
    CHECK(std::isfinite(c.upper));
    CHECK(std::isfinite(c.derivative));
    CHECK(c.lower > 0.0);
    CHECK(c.upper > 0.0);
  }
}

TEST_CASE("kernel: zero arguments, methods, symmetries and damping") {
  const double r = 0.5, R = 2.0;
  KernelOptions radial;
  radial.method = KernelMethod::radial;
  const QuadResult k0 = kernel(0, 0, {0, 0}, 1.0, r, R, Branch::A, 1, radial);
  CHECK(k0.converged);
  CHECK(std::abs(k0.value.imag()) < 1e-12 * k0.value.real());
  CHECK(k0.value.real() == doctest::Approx(kernel_plane_area(1.0, r, R)).epsilon(1e-9));
  CHECK(k0.value.real() > 0.0);
  CHECK(k0.value.real() <= 4.0 * std::numbers::pi * R * R);

  const QuadResult t0 = kernel(0, 0, {0, 0}, 1.0, r, R, Branch::A, 1);
  CHECK(std::abs(t0.value - k0.value) < 1e-6 * std::abs(k0.value));

  for (Branch b : {Branch::A, Branch::B}) {
    const QuadResult a = kernel(3.0, 0.5, {0.7, 0.4}, 0.8, r, R, b, 1);
    const QuadResult c = kernel(3.0, 0.5, {0.7, 0.4}, 0.8, r, R, b, 1, radial);
    CHECK(a.converged);
    CHECK(c.converged);
    CHECK(std::abs(a.value - c.value) < 1e-6 * std::abs(c.value));
    const QuadResult m = kernel(3.0, 0.5, {0.7, 0.4}, 0.8, r, R, b, -1, radial);
    CHECK(std::abs(m.value - std::conj(c.value)) < 1e-12 * std::abs(c.value));
  }

  // Self-convergence against a tighter tolerance.
  KernelOptions tight = radial;
  tight.tol = 1e-10;
  const QuadResult lo = kernel(200.0, 0.1, {150.0, 0.0}, 1.3, r, R, Branch::B, 1, radial);
  const QuadResult hi = kernel(200.0, 0.1, {150.0, 0.0}, 1.3, r, R, Branch::B, 1, tight);
  CHECK(std::abs(lo.value - hi.value) <= 1e-6 * std::max(std::abs(hi.value), 1e-3));

  // Gaussian damping: |K| <= area e^{-tau r^2 / 4} since |xi_h| >= r/2 on the support.
  for (double tau : {5.0, 20.0, 80.0}) {
    const QuadResult d = kernel(4.0, tau, {1.0, 0.0}, 1.0, r, R, Branch::A, 1, radial);
    CHECK(std::abs(d.value) <= kernel_plane_area(1.0, r, R) * std::exp(-tau * r * r / 4));
  }

  // Continuity at theta = 0.
  const QuadResult small = kernel(1e-6, 0, {0, 0}, 1.0, r, R, Branch::A, 1, radial);
  CHECK(std::abs(small.value - k0.value) < 1e-5 * std::abs(k0.value));

  CHECK_THROWS_AS(kernel(1, 0, {0, 0}, 1, 2.0, 1.0, Branch::A, 1), ParameterError);
  CHECK_THROWS_AS(kernel(1, 0, {0, 0}, 1, r, R, Branch::A, 0), ParameterError);
}

TEST_CASE("kernel decay fit on a small sample") {
  DecayFitOptions opt;
  for (int e = 0; e <= 12; ++e) opt.theta.push_back(std::pow(10.0, e / 4.0));
  opt.samples = 16;
  const DecayFit fit = kernel_decay_fit(Branch::A, 0.25, 4.0, 1.0, opt);
  CHECK(fit.sup_abs.size() == opt.theta.size());
  CHECK(fit.slope < 0.0);
  CHECK(std::isfinite(fit.bound_ratio));
  CHECK(fit.window_lo == doctest::Approx(1000.0 / std::pow(10.0, 1.5)));
  CHECK(fit.sup_abs.front() > fit.sup_abs.back());

  DecayFitOptions short_grid;
  short_grid.theta = {1.0, 10.0, 100.0};
  CHECK_THROWS_AS(kernel_decay_fit(Branch::A, 0.25, 4.0, 1.0, short_grid), ParameterError);

  const TauFit tf = kernel_tau_fit(Branch::B, 0.5, 2.0, 5.0, {8.0, 16.0, 24.0, 32.0}, 8, 2);
  CHECK(tf.slope < 0.0);
  CHECK(tf.expected == doctest::Approx(-0.125));
}

TEST_CASE("Strichartz norm: t = 0 bound, sup, refinement") {
  const StrichartzProfile f;
  StrichartzOptions opt;
  opt.t_per_decade = 4;
  const StrichartzResult res = semigroup_strichartz_norm(f, 0.1, opt);
  const double rho_max = f.rho0 + f.rho_width;
  CHECK(res.value_t0 > 0.0);
  CHECK(res.value_t0 <= rho_max / (2.0 * std::sqrt(std::numbers::pi)));
  double m = res.value_t0;
  for (double v : res.value) m = std::max(m, v);
  CHECK(res.lp_norm(INFINITY) == m);
  CHECK_FALSE(res.accuracy_degraded);

  StrichartzOptions fine = opt;
  fine.t_per_decade = 8;
  fine.panel_factor = 2.0;
  fine.x_samples = 96;
  fine.xi3_nodes = 36;
  const StrichartzResult ref = semigroup_strichartz_norm(f, 0.1, fine);
  for (double p : {1.0, 2.0}) {
    CHECK(std::abs(res.lp_norm(p) / ref.lp_norm(p) - 1.0) < 0.02);
  }

  CHECK_THROWS_AS(strichartz_scaling_sweep(f, {0.1, 0.05}, {1.0}, opt), ParameterError);
  StrichartzOptions bad = opt;
  bad.alpha = 0.4;
  CHECK_THROWS_AS(strichartz_scaling_sweep(f, {0.1, 0.001}, {1.0}, bad), ParameterError);
}
