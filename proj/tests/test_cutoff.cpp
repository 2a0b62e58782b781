#include <doctest.h>

#include <cmath>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/random_field.hpp"

using namespace rotmhd;

TEST_CASE("cutoff: plateau on the band, vanishing outside the doubled band") {
  const double r = 0.5, R = 4.0;
  CHECK(psi({1.0, 1.0, 1.0}, r, R) == doctest::Approx(1.0));
  CHECK(psi({0.5, 0.0, 0.5}, r, R) == doctest::Approx(1.0));
  CHECK(psi({0.0, 0.0, 2.0}, r, R) == 0.0);   // xi_h = 0
  CHECK(psi({2.0, 0.0, 0.1}, r, R) == 0.0);   // |xi_3| < r/2
  CHECK(psi({6.0, 6.0, 1.0}, r, R) == 0.0);   // |xi| > 2R
  for (double a : {0.3, 0.7, 1.9, 5.0, 7.5}) {
    const double v = psi({a, 0.4 * a, 0.6 * a}, r, R);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(in_band({1.0, 0.0, 1.0}, r, R));
  CHECK_FALSE(in_band({0.1, 0.0, 1.0}, r, R));
}

TEST_CASE("split of the initial data") {
  const Grid g(16, 16, 32.0, 32.0);
  const ModelParams p = ModelParams::rotating(0.2, 1.0);
  const StateVector U = random_state(g, {0.1, 2.5}, 31);
  const SplitResult s = split_initial_data(U, 0.4, 1.5, p);
  CHECK(l2_norm(s.low + s.high - U) < 1e-14 * l2_norm(U));
  CHECK(divergence_defect(s.low.u) < 1e-12);
  CHECK(divergence_defect(s.high.b) < 1e-12);
  CHECK(s.high_h0s == doctest::Approx(h0s_norm(s.high, p.s)));
  CHECK(s.empirical_constant ==
        doctest::Approx(s.high_h0s * std::pow(1.5, p.beta * p.eta) / s.data_y_norm));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!in_band(g.frequency(i), 0.4, 1.5)) continue;
    CHECK(std::abs(s.high.u.comp[0][i]) < 1e-12 * l2_norm(U));
  }
}

TEST_CASE("parameter schedule") {
  CHECK(admissible_alpha(1, 1, 1) == doctest::Approx(1.0 / 115.0));
  const double a0 = admissible_alpha(1, 1, 1);
  const CutoffParams c = schedule_parameters(1e-3, a0, 1, 1, 1, 4.0);
  CHECK(c.alpha_admissible);
  CHECK(c.exponents_positive);
  CHECK(c.exponent_low == doctest::Approx(0.25 - a0 * (0.75 + 16.0)));
  CHECK(c.exponent_high == doctest::Approx(0.25 - a0 * (1.75 + 26.0)));
  CHECK(c.bootstrap_margin);
  CHECK(c.R == doctest::Approx(4.0 * std::pow(1e-3, -a0)));
  CHECK(c.r == doctest::Approx(1.0 / c.R));

  const CutoffParams big = schedule_parameters(1e-3, 0.05, 1, 1, 1);
  CHECK_FALSE(big.alpha_admissible);
  CHECK_FALSE(big.exponents_positive);

  CHECK_THROWS_AS(schedule_parameters(1.5, a0, 1, 1, 1), ParameterError);
  CHECK_THROWS_AS(schedule_parameters(0.5, a0, 1, 1, 1, 0.5), ParameterError);

  const Grid g(16, 16, 64.0, 64.0);
  CHECK(check_band_resolution(g, 0.5).empty());
  CHECK_FALSE(check_band_resolution(Grid(16, 16, 8.0, 8.0), 0.5).empty());
}
