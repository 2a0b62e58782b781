#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"
#include "rotmhd/littlewood_paley.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/random_field.hpp"

using namespace rotmhd;
constexpr double kPi = std::numbers::pi;

namespace {

SpectralField scalar_field(const Grid& g, auto&& f) {
  PhysicalField p(g);
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2)
      for (int i3 = 0; i3 < g.n_v(); ++i3)
        p.comp[0][g.index(i1, i2, i3)] = f(g.x_h(i1), g.x_h(i2), g.x_v(i3));
  return forward_transform(p);
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.comp) m = std::max(m, max_abs(c));
  return m;
}

}  // namespace

TEST_CASE("bump functions: supports, plateau and partition of unity") {
  for (int n = 0; n <= 4000; ++n) {
    const double z = 3.0 * n / 4000.0;
    if (z <= 0.75 || z >= 8.0 / 3.0) CHECK(lp_ring(z) == 0.0);
    if (z >= 4.0 / 3.0 && z <= 1.5) CHECK(lp_ring(z) == 1.0);
    if (z <= 0.75) CHECK(lp_low(z) == 1.0);
    if (z >= 4.0 / 3.0) CHECK(lp_low(z) == 0.0);
    CHECK(lp_low(z) == lp_low(-z));
  }
  const int Q = 8;
  for (int n = 0; n <= 5000; ++n) {
    const double z = std::ldexp(1.5, Q) * n / 5000.0;
    double s = lp_low(z);
    for (int q = 0; q <= Q; ++q) s += lp_ring(std::ldexp(z, -q));
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("vertical blocks of a plane wave and telescoping identities") {
  const Grid g(8, 16, 2 * kPi, 2 * kPi / 1.4);
  const SpectralField u = scalar_field(g, [](double, double, double z) { return std::cos(1.4 * z); });
  for (int q = -1; q <= max_block(g, Direction::vertical); ++q) {
    const double m = max_abs(dyadic_block(u, q, Direction::vertical));
    if (q == 0) {
      CHECK(std::abs(m - max_abs(u)) < 1e-12 * max_abs(u));
    } else {
      CHECK(m < 1e-12 * max_abs(u));
    }
  }
  const StateVector R = random_state(g, {0.5, 40.0}, 3);
  const SpectralField& v = R.u;
  SpectralField sum(g);
  for (int q = -1; q <= max_block(g, Direction::vertical); ++q) sum += dyadic_block(v, q, Direction::vertical);
  CHECK(max_abs(sum - v) < 1e-12 * max_abs(v));
  for (int q = 0; q <= 3; ++q) {
    SpectralField acc = low_pass(v, q, Direction::vertical);
    for (int p = q; p <= max_block(g, Direction::vertical); ++p) acc += dyadic_block(v, p, Direction::vertical);
    CHECK(max_abs(acc - v) < 1e-12 * max_abs(v));
  }
}

TEST_CASE("dyadic ladder reconstruction and two-apart disjointness") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const SpectralField u = random_state(g, {0.5, 40.0}, 8).u;
  const DyadicLadder L = build_ladder(u);
  CHECK(l2_norm(L.reconstruct() - u) < 1e-10 * l2_norm(u));
  for (int q = -1; q <= L.q_max; ++q)
    for (int p = q + 2; p <= L.q_max; ++p) {
      const SpectralField qq = dyadic_block(dyadic_block(u, q, Direction::vertical), p, Direction::vertical);
      CHECK(max_abs(qq) == 0.0);
      const SpectralField hh = dyadic_block(dyadic_block(u, q, Direction::horizontal), p, Direction::horizontal);
      CHECK(max_abs(hh) == 0.0);
    }
}

TEST_CASE("dyadic Sobolev norm") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const SpectralField one = scalar_field(g, [](double, double, double z) { return std::cos(3 * z); });
  for (double s : {-1.0, 0.5, 1.0}) {
    const double ratio = dyadic_sobolev_norm(one, 0.0, s) / h0s_norm(one, s);
    const double bound = std::exp2(std::abs(s)) * 2.0;
    CHECK(ratio <= bound);
    CHECK(ratio >= 1.0 / bound);
  }
  // A smooth partition is not orthogonal: sum of squared multipliers lies in
  // [1/2, 1], so at sigma = 0 the dyadic norm lies in [L2/sqrt(2), L2].
  const SpectralField u = random_state(g, {0.5, 40.0}, 4).u;
  const double r0 = dyadic_sobolev_norm(u, 0.0, 0.0) / l2_norm(u);
  CHECK(r0 <= 1.0 + 1e-12);
  CHECK(r0 >= std::sqrt(0.5) - 1e-12);
  // Fields whose spectrum avoids the transition annuli are exact.
  const SpectralField plateau = scalar_field(g, [](double x, double y, double z) {
    return std::cos(3 * x) * std::cos(6 * z) + std::cos(6 * y) * std::cos(3 * z) + 0.5;
  });
  CHECK(std::abs(dyadic_sobolev_norm(plateau, 0.0, 0.0) - l2_norm(plateau)) <
        1e-12 * l2_norm(plateau));
}

TEST_CASE("Bony decomposition reconstructs the dealiased product") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const StateVector R = random_state(g, {0.5, 40.0}, 5);
  const BonyParts P = bony_decompose(R.u, 0, R.b, 1);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(P.t_ab[i] + P.t_ba[i] + P.remainder[i] - P.product[i]));
  CHECK(err < 1e-9 * max_abs(P.product));

  const SpectralField c = scalar_field(g, [](double, double, double) { return 2.0; });
  const BonyParts Q = bony_decompose(R.u, 0, c, 0);
  double e2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    e2 = std::max(e2, std::abs(Q.t_ab[i] + Q.t_ba[i] + Q.remainder[i] - Q.product[i]));
  CHECK(e2 < 1e-9 * max_abs(Q.product));
  CHECK(max_abs(Q.t_ab) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Bernstein harness") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const SpectralField u = scalar_field(g, [](double x, double, double) { return std::cos(3 * x); });
  CHECK(check_bernstein(u, 0, 2.0, 2.0, BernsteinMode::isotropic, 3.0).ratio ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_bernstein(u, 1, 2.0, 2.0, BernsteinMode::isotropic, 3.0).ratio ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_bernstein(u, 1, 4.0, 4.0, BernsteinMode::horizontal, 3.0).ratio ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(check_bernstein(u, 1, 4.0, 2.0, BernsteinMode::isotropic, 3.0), ParameterError);
}

TEST_CASE("product laws: hypotheses and single-mode closed form") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const SpectralField u = scalar_field(g, [](double x, double, double) { return std::cos(x); });
  const ProductReport r = check_product_law(u, u, ProductLaw::vertical, {0.5, 0.0, 1.0, 0.0});
  const double V = g.volume();
  const double un = std::sqrt(std::pow(2.0, 0.5) * V / 2);
  const double vn = std::sqrt(V / 2);
  const double uvn = std::sqrt(0.25 * V + std::pow(5.0, -0.5) * 0.25 * V / 2);
  CHECK(r.rhs_product == doctest::Approx(un * vn).epsilon(1e-12));
  CHECK(r.lhs_norm == doctest::Approx(uvn).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(check_product_law(u, u, ProductLaw::vertical, {1.0, 0.0, 1.0, 0.0}),
                       doctest::Contains("sigma < 1"), ParameterError);
  CHECK_THROWS_WITH_AS(check_product_law(u, u, ProductLaw::vertical, {0.5, 0.0, 0.4, 0.0}),
                       doctest::Contains("s0 > 1/2"), ParameterError);
  CHECK_THROWS_AS(check_product_law(u, u, ProductLaw::isotropic, {1.5, 0.5}), ParameterError);
  CHECK_THROWS_AS(check_product_law(u, u, ProductLaw::anisotropic, {0.5, 0.5, 0.5, 0.2}),
                  ParameterError);
  CHECK_NOTHROW(check_product_law(u, u, ProductLaw::anisotropic, {0.5, 0.5, 0.2, 0.2}));
}

TEST_CASE("energy lemma harness and exact cancellations") {
  const Grid g(16, 16, 2 * kPi, 2 * kPi);
  const StateVector A = random_state(g, {1.0, 5.0}, 6);
  const StateVector B = random_state(g, {1.0, 5.0}, 7);
  for (auto lemma : {EnergyLemma::advection_regular, EnergyLemma::symmetric_regular}) {
    const EnergyReport r = check_energy_lemma(A.u, A.b, B.u, lemma, 1.0, 1.0, 4);
    CHECK(std::abs(r.advection_bracket) < 1e-10 * r.scale);
    CHECK(std::abs(r.symmetric_bracket) < 1e-10 * r.scale);
    CHECK(std::isfinite(r.ratio_sum));
  }
  const EnergyReport s = check_energy_lemma(A.u, A.b, A.b, EnergyLemma::symmetric_rough, 1.0, 0.0, 4);
  CHECK(std::abs(s.symmetric_bracket) < 1e-10 * s.scale);
  CHECK_THROWS_AS(check_energy_lemma(A.u, A.b, B.u, EnergyLemma::advection_regular, 1.0, 0.5, 4), ParameterError);
  CHECK_THROWS_AS(check_energy_lemma(A.u, A.b, B.u, EnergyLemma::advection_rough, 1.0, -1.5, 4), ParameterError);
  CHECK_THROWS_AS(check_energy_lemma(A.u, A.b, B.u, EnergyLemma::advection_rough, 0.4, 0.0, 4), ParameterError);
}
