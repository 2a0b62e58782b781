// Linearised rotating MHD system: the 6x6 Fourier symbol, its closed-form
// eigen-decomposition, Cramer coefficients of divergence-free data and the
// exact per-mode propagator.
//
// Unknown ordering is (u1, u2, u3, b1, b2, b3).  In the rotating system the
// symbol is
//   B(xi) = -nu |xi_h|^2 I + (Leray-projected rotation) - i mu xi_3 (coupling)
// with nu = nu' = eps^alpha and mu = 1/eps.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "rotmhd/field.hpp"

namespace rotmhd {

using Mat6 = Eigen::Matrix<cplx, 6, 6>;
using Vec6 = Eigen::Matrix<cplx, 6, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Freq = std::array<double, 3>;

enum class SystemKind {
  rotating,  // nu = nu' = eps^alpha, mu = 1/eps
  generic,   // independent nu, nu', mu
};

struct ModelParams {
  SystemKind kind = SystemKind::rotating;
  double eps = 0.1;
  double alpha = 0.0;
  double nu = 1.0;    // horizontal viscosity of u
  double nu_m = 1.0;  // horizontal magnetic diffusivity
  double mu = 10.0;   // coupling coefficient of d_3
  double s = 1.0;
  double eta = 1.0;
  double beta = 1.0;

  static ModelParams rotating(double eps, double alpha, double s = 1.0,
                              double eta = 1.0, double beta = 1.0);
  static ModelParams generic(double eps, double nu, double nu_m, double mu,
                             double s = 1.0, double eta = 1.0, double beta = 1.0);

  // Throws ParameterError naming the first violated constraint.
  void validate() const;
  // 1/eps, or 0 when eps is infinite (rotation switched off).
  double rotation() const;
};

// Dispersion factors; A * B = 1 and A - B = 1/|xi|.
double dispersion_A(double k);
double dispersion_B(double k);

Mat6 assemble_symbol(const Freq& xi, const ModelParams& p);

// Closed forms of the rotating system (ordering lambda_1..lambda_6).
std::array<cplx, 6> eigenvalues(const Freq& xi, const ModelParams& p);
// W_1..W_6 with the unnormalised component formulas.
std::array<Vec6, 6> eigenvectors(const Freq& xi, const ModelParams& p);

// P(Y) = Y^3 + (x3^2/e^2)(1/|xi|^2 + 3) Y^2 + (x3^4/e^4)(1/|xi|^2 + 3) Y + x3^6/e^6,
// with det(B - X I) = P((X + nu |xi_h|^2)^2).
cplx characteristic_polynomial(cplx Y, const Freq& xi, const ModelParams& p);

// Degenerate when xi_3 = 0 (which covers xi_1^2 + xi_3^2 = 0) or xi = 0.
bool is_degenerate(const Freq& xi);

// 4x4 matrix of components (1,2,4,5) of W_3..W_6.
Mat4 cramer_matrix(const Freq& xi, const ModelParams& p);
// Closed form |det D| = 4 x3^2 (x1^2 + x3^2)^2 (4|xi|^2 + 1).
double cramer_det_closed_form(const Freq& xi);
// C_3..C_6 = det(D_i) / det(D).
std::array<cplx, 4> cramer_coefficients(const Vec6& U0, const Freq& xi,
                                        const ModelParams& p);

struct ModeEigenSystem {
  Freq xi{};
  double A = 0.0;
  double B = 0.0;
  std::array<cplx, 6> lambdas{};
  std::array<Vec6, 6> W{};
  std::optional<std::array<cplx, 4>> C;
  bool degenerate = false;
};

ModeEigenSystem mode_eigensystem(const Freq& xi, const ModelParams& p);
// Also fills C from the given divergence-free six-vector.
ModeEigenSystem decompose_initial(const Vec6& U0, const Freq& xi,
                                  const ModelParams& p);

// Scaling-and-squaring Pade(13) exponential of M (Higham 2005) with a trace
// shift.  Throws NumericalError when ||M||_1 > 1e6.
Mat6 expm(const Mat6& M);
Mat6 expm_oracle(const Mat6& M, double t);

// Per-mode propagator exp(t B(xi)) through the eigen-expansion:
// W_3..W_6 diag(exp(lambda t)) D^{-1} S, with S selecting components
// (1,2,4,5).  Exact on divergence-free vectors only.
Mat6 eigen_propagator(const Freq& xi, const ModelParams& p, double t);

// Frequency cutoff used to route modes: inside supp Psi the eigen-expansion,
// elsewhere the matrix exponential.
struct CutoffBand {
  double r = 0.0;
  double R = 0.0;
};

enum class ModeRoute { identity, eigen, expm };

// Without a cutoff, every non-degenerate mode whose Cramer matrix is not
// close to singular (x3^2 (x1^2 + x3^2) >= 1e-6 |xi|^4) takes the eigen route.
ModeRoute route_mode(const Freq& xi, const std::optional<CutoffBand>& cutoff);

// Propagator matrices exp(t B(xi)) for every retained mode of a grid.
// Immutable after construction; apply() is reentrant.
class ExactPropagator {
 public:
  ExactPropagator(const Grid& g, const ModelParams& p, double t,
                  std::optional<CutoffBand> cutoff = std::nullopt,
                  bool retained_only = true);

  const Grid& grid() const { return grid_; }
  double time() const { return t_; }
  void apply(StateVector& U) const;
  StateVector operator()(const StateVector& U) const {
    StateVector out = U;
    apply(out);
    return out;
  }
  // Counts of modes per route.
  std::array<std::size_t, 3> route_counts() const { return counts_; }

 private:
  Grid grid_;
  double t_;
  std::vector<std::size_t> modes_;
  std::vector<Mat6> mats_;
  std::array<std::size_t, 3> counts_{};
};

// Shared, lazily built propagators keyed by exact (grid, parameter, t) bits.
std::shared_ptr<const ExactPropagator> cached_propagator(
    const Grid& g, const ModelParams& p, double t,
    std::optional<CutoffBand> cutoff = std::nullopt);

// U(t) = exp(t B) U for a divergence-free state; every mode of the grid is
// propagated (mode 0 is the identity).
StateVector propagate_exact(const StateVector& U, double t, const ModelParams& p,
                            std::optional<CutoffBand> cutoff = std::nullopt);

}  // namespace rotmhd
