#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/linear.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/random_field.hpp"

using namespace rotmhd;

namespace {

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

}  // namespace

TEST_CASE("symbol entries at xi = (1,0,0)") {
  const ModelParams p = ModelParams::rotating(1.0, 1.0);
  const Mat6 M = assemble_symbol({1.0, 0.0, 0.0}, p);
  CHECK(M(1, 0) == cplx(-1.0));
  for (int i = 0; i < 6; ++i) CHECK(M(i, i).real() == -1.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(M(i, i + 3) == cplx(0.0));
    CHECK(M(i + 3, i) == cplx(0.0));
  }
  CHECK_THROWS_AS(assemble_symbol({0.0, 0.0, 0.0}, p), DegenerateModeError);
}

TEST_CASE("closed-form eigenvalues") {
  const ModelParams p = ModelParams::rotating(0.1, 1.0);
  const auto lam = eigenvalues({0.0, 0.0, 1.0}, p);
  CHECK(lam[0] == cplx(0.0, 10.0));
  CHECK(lam[1] == cplx(0.0, -10.0));
  CHECK(std::abs(lam[2].imag() - 10.0 * (1 + std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(std::abs(lam[2].imag() - 16.180339887498949) < 1e-12);
  CHECK(std::abs(lam[4].imag() - 6.1803398874989485) < 1e-12);

  const auto flat = eigenvalues({0.3, 0.4, 0.0}, p);
  for (const auto& l : flat) CHECK(l == cplx(-0.1 * 0.25, 0.0));

  for (double k : {0.1, 1.0, 7.3}) {
    CHECK(std::abs(dispersion_A(k) * dispersion_B(k) - 1.0) < 1e-12);
    CHECK(std::abs(dispersion_A(k) - dispersion_B(k) - 1.0 / k) < 1e-12 / k);
  }
}

TEST_CASE("characteristic polynomial matches det(B - X I)") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  const ModelParams p = ModelParams::rotating(0.3, 0.5);
  const Freq xi{0.7, -1.1, 0.9};
  const Mat6 M = assemble_symbol(xi, p);
  const double shift = p.nu * (xi[0] * xi[0] + xi[1] * xi[1]);
  for (int t = 0; t < 20; ++t) {
    const cplx X(n(rng), n(rng));
    const cplx lhs = (M - X * Mat6::Identity()).determinant();
    const cplx rhs = characteristic_polynomial((X + shift) * (X + shift), xi, p);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("eigenvectors: residuals, fixed pair, orthogonality") {
  std::mt19937_64 rng(2);
  const ModelParams p = ModelParams::rotating(0.05, 0.5);
  for (int t = 0; t < 100; ++t) {
    const Freq xi = random_band_freq(rng, 0.25, 4.0);
    const Mat6 M = assemble_symbol(xi, p);
    const auto W = eigenvectors(xi, p);
    const auto lam = eigenvalues(xi, p);
    const double Mn = M.norm();
    for (int i = 0; i < 6; ++i) {
      CHECK((M * W[i] - lam[i] * W[i]).norm() <= 1e-10 * W[i].norm() * Mn);
    }
    Vec6 a = Vec6::Zero(), b = Vec6::Zero();
    a << xi[0], xi[1], xi[2], 0, 0, 0;
    b << 0, 0, 0, xi[0], xi[1], xi[2];
    for (int i = 2; i < 6; ++i) {
      CHECK(std::abs(a.dot(W[i])) < 1e-12 * W[i].norm() * a.norm());
      CHECK(std::abs(b.dot(W[i])) < 1e-12 * W[i].norm() * b.norm());
    }
  }
  const auto W = eigenvectors({0.5, 0.2, 1.0}, p);
  CHECK(W[0](2) == cplx(1.0));
  CHECK(W[0](5) == cplx(-1.0));
  CHECK(W[1](5) == cplx(1.0));
  CHECK_THROWS_AS(eigenvectors({1.0, 1.0, 0.0}, p), DegenerateModeError);
}

TEST_CASE("Cramer coefficients") {
  const ModelParams p = ModelParams::rotating(0.2, 0.0);
  CHECK(std::abs(std::abs(cramer_matrix({1.0, 0.0, 1.0}, p).determinant()) - 144.0) < 1e-10);
  CHECK(cramer_det_closed_form({1.0, 0.0, 1.0}) == 144.0);

  const Freq xi{0.4, -0.9, 1.3};
  const auto W = eigenvectors(xi, p);
  const auto C = cramer_coefficients(W[2], xi, p);
  CHECK(std::abs(C[0] - 1.0) < 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(C[i]) < 1e-12);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Freq k = random_band_freq(rng, 0.25, 4.0);
    const Vec6 U0 = random_solenoidal(rng, k);
    const auto c = cramer_coefficients(U0, k, p);
    const auto w = eigenvectors(k, p);
    Vec6 rec = Vec6::Zero();
    for (int i = 0; i < 4; ++i) rec += c[i] * w[i + 2];
    CHECK((rec - U0).norm() < 1e-10 * U0.norm());
    CHECK(std::abs(std::abs(cramer_matrix(k, p).determinant()) - cramer_det_closed_form(k)) <
          1e-10 * cramer_det_closed_form(k));
  }
  Vec6 bad = Vec6::Zero();
  bad(2) = 1.0;
  CHECK_THROWS_AS(cramer_coefficients(bad, xi, p), InvariantError);
  CHECK_THROWS_AS(cramer_coefficients(W[2], {1.0, 0.0, 0.0}, p), DegenerateModeError);
}

TEST_CASE("expm against closed forms and the Eigen reference") {
  CHECK((expm_oracle(Mat6::Random(), 0.0) - Mat6::Identity()).norm() == 0.0);
  Mat6 D = Mat6::Zero();
  for (int i = 0; i < 6; ++i) D(i, i) = cplx(0.3 * i - 1.0, 0.7 * i);
  const Mat6 E = expm(D);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(E(i, i) - std::exp(D(i, i))) < 1e-14);

  Mat6 N = Mat6::Zero();
  N(0, 1) = 2.5;
  const Mat6 EN = expm_oracle(N, 3.0);
  CHECK(std::abs(EN(0, 1) - 7.5) < 1e-13);
  CHECK(std::abs(EN(0, 0) - 1.0) < 1e-15);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (double scale : {0.01, 1.0, 30.0}) {
    Mat6 M;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) M(i, j) = scale * cplx(n(rng), n(rng));
    const Mat6 ref = M.exp();
    CHECK((expm(M) - ref).norm() <= 1e-12 * ref.norm() * std::max(1.0, scale));
  }
  Mat6 huge = Mat6::Identity() * 2e6;
  CHECK_THROWS_AS(expm(huge), NumericalError);
}

TEST_CASE("eigen propagator matches expm and the decay law") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  const ModelParams p = ModelParams::rotating(0.1, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Freq xi = random_band_freq(rng, 0.25, 4.0);
    const double time = ut(rng);
    const Vec6 U0 = random_solenoidal(rng, xi);
    const Vec6 a = eigen_propagator(xi, p, time) * U0;
    const Vec6 b = expm_oracle(assemble_symbol(xi, p), time) * U0;
    const double decay = std::exp(-p.nu * (xi[0] * xi[0] + xi[1] * xi[1]) * time);
    CHECK((a - b).norm() < 1e-9 * decay * U0.norm());
    CHECK(std::abs(a.norm() - decay * U0.norm()) < 1e-9 * decay * U0.norm());
  }
}

TEST_CASE("propagate_exact on a grid") {
  const Grid g(8, 8, 8.0, 8.0);
  const ModelParams p = ModelParams::rotating(0.2, 1.0);
  const StateVector U = random_state(g, {0.5, 3.0}, 9);
  const StateVector same = propagate_exact(U, 0.0, p);
  CHECK(l2_norm(same - U) < 1e-14 * l2_norm(U));

  const double t = 1.7;
  const StateVector V = propagate_exact(U, t, p, CutoffBand{0.5, 2.0});
  double expected = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto xi = g.frequency(i);
    const double w = std::exp(-2 * p.nu * (xi[0] * xi[0] + xi[1] * xi[1]) * t);
    for (int c = 0; c < 3; ++c)
      expected += w * (std::norm(U.u.comp[c][i]) + std::norm(U.b.comp[c][i]));
  }
  expected = std::sqrt(expected * g.parseval_weight());
  CHECK(std::abs(l2_norm(V) - expected) < 1e-9 * expected);
  CHECK(divergence_defect(V.u) < 1e-12);
  CHECK(hermitian_defect(V.u) < 1e-12);

  const StateVector W = propagate_exact(U, t, p);
  CHECK(l2_norm(W - V) < 1e-10 * l2_norm(V));

  const ExactPropagator prop(g, p, t);
  const auto counts = prop.route_counts();
  CHECK(counts[0] == 1);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("parameter validation") {
  ModelParams p = ModelParams::rotating(0.1, 0.5);
  CHECK_NOTHROW(p.validate());
  p.mu = 3.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_THROWS_AS(ModelParams::rotating(0.1, 0.5, 0.4).validate(), ParameterError);
  CHECK_THROWS_AS(ModelParams::rotating(0.1, 0.5, 1.0, 1.0, 0.5).validate(), ParameterError);
  CHECK_NOTHROW(ModelParams::generic(INFINITY, 0.1, 0.2, 0.0).validate());
}
