// Continuum-frequency experiments on the dispersive part of the linear flow:
// the phases xi_3 A(|xi|), xi_3 B(|xi|), the oscillatory kernels built from
// them, their decay in the scaled time, and Strichartz-type norms of the
// damped dispersive semigroups.  Nothing here uses the torus.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "rotmhd/grid.hpp"
#include "rotmhd/linear.hpp"

namespace rotmhd {

enum class Branch { A, B };

const char* branch_name(Branch b);

// Gamma = xi_3 A(|xi|) or xi_3 B(|xi|).
double phase(Branch b, const Freq& xi);
// gamma = -d Gamma / d xi_2.
double phase_slope(Branch b, const Freq& xi);
// d gamma / d xi_2.
double phase_slope_derivative(Branch b, const Freq& xi);
// d Gamma / d rho with rho = |xi_h|, at fixed xi_3.
double radial_phase_slope(Branch b, double rho, double xi3);

// Smallest constants making the four phase bounds hold on the sampled points:
//   lower: C^{-1} R^{-3-beta} |xi_2| <= |gamma|
//   upper: |gamma| <= C R^beta
//   derivative: |d gamma / d xi_2| <= C R^{2 beta}
struct PhaseBoundConstants {
  double lower = 0.0;
  double upper = 0.0;
  double derivative = 0.0;
  int samples = 0;
};

PhaseBoundConstants phase_bound_constants(Branch b, double r, double R, double beta,
                                          int samples, std::uint64_t seed);

struct QuadResult {
  cplx value;
  double error = 0.0;  // |I(2n) - I(n)| at the last doubling
  bool converged = true;
  int panels = 0;
};

enum class KernelMethod { tensor, radial };

struct KernelOptions {
  double tol = 1e-6;
  KernelMethod method = KernelMethod::tensor;
  int max_panels = 1 << 18;  // per axis
};

// Integral over xi_h of Psi(xi) exp(-/+ i theta Gamma + i z_h.xi_h - tau |xi_h|^2),
// with sign = +1 selecting exp(-i theta Gamma).  The tensor method runs
// composite Gauss-Legendre over the square [-rho_max, rho_max]^2; the radial
// method uses the rotation invariance of the integrand, which reduces it to
// 2 pi int Psi e^{...} J0(|z_h| rho) rho d rho.  Both double the panel count
// until |I(2n) - I(n)| <= tol max(|I(2n)|, 1e-6 int |integrand|, 1e-8 4 pi R^2),
// the last term being 1e-8 of the largest attainable |K|.
QuadResult kernel(double theta, double tau, std::array<double, 2> z_h, double xi3,
                  double r, double R, Branch b, int sign, const KernelOptions& opt = {});

// Integral of Psi over the horizontal plane at height xi3.
double kernel_plane_area(double xi3, double r, double R);

struct DecayFitOptions {
  std::vector<double> theta;  // log-spaced, at least 3 decades
  double tau = 0.0;
  int samples = 256;          // Latin hypercube in (xi_3, |z_h| / theta)
  std::uint64_t seed = 1;
  double window_lo = 0.0;     // fit window in theta; 0 = last 1.5 decades
  double window_hi = 0.0;
  double tol = 1e-6;
};

struct DecayFit {
  std::vector<double> theta;
  std::vector<double> sup_abs;
  std::vector<double> error;  // largest quadrature error estimate per theta
  double slope = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool accuracy_degraded = false;
  // sup |K| theta^{1/2} e^{r^2 tau / 2} / R^{4 + 3 beta} over the theta grid.
  double bound_ratio = 0.0;
};

DecayFit kernel_decay_fit(Branch b, double r, double R, double beta,
                          const DecayFitOptions& opt);

struct TauFit {
  std::vector<double> tau;
  std::vector<double> sup_abs;
  double slope = 0.0;     // d log sup|K| / d tau
  double expected = 0.0;  // -r^2 / 2
  bool accuracy_degraded = false;
};

TauFit kernel_tau_fit(Branch b, double r, double R, double theta,
                      const std::vector<double>& tau, int samples, std::uint64_t seed,
                      double tol = 1e-6);

// Closed-form data: f_hat(xi) = bump((|xi_h| - rho0) / rho_width)
// * bump((xi_3 - xi3_0) / xi3_width), bump(x) = exp(1 - 1/(1 - x^2)) on |x| < 1.
struct StrichartzProfile {
  double rho0 = 1.0;
  double rho_width = 0.25;
  double xi3_0 = 1.0;
  double xi3_width = 0.25;

  double value(double rho, double xi3) const;
  double l2_norm() const;  // L^2 norm of f, Fourier convention f_hat = int e^{-ix.xi} f
};

struct StrichartzOptions {
  double r = 0.5;
  double R = 2.0;
  Branch branch = Branch::A;
  int sign = 1;
  double alpha = 0.0;
  int t_per_decade = 6;
  int xi3_nodes = 24;
  int x_samples = 48;
  double panel_factor = 1.0;   // scales the oscillation-based panel count
  double damping_cut = 40.0;   // skip t once tau rho_min^2 exceeds this
};

struct StrichartzResult {
  std::vector<double> t;
  std::vector<double> value;  // ||Psi(D) G(t) f||_{L^inf_h L^2_v} / ||f||_{L^2}
  double value_t0 = 0.0;
  double f_l2 = 0.0;
  bool accuracy_degraded = false;
  double error_estimate = 0.0;  // relative change under panel doubling at the largest t

  // L^p in time of value(t) (p = infinity gives the sup).
  double lp_norm(double p) const;
};

StrichartzResult semigroup_strichartz_norm(const StrichartzProfile& f, double eps,
                                           const StrichartzOptions& opt);

struct ScalingSweep {
  std::vector<double> eps;
  std::vector<double> p;
  std::vector<std::vector<double>> norms;  // [p index][eps index]
  std::vector<double> slope;               // fitted d log norm / d log eps
  std::vector<double> predicted;           // (1 - 3 alpha) / (4 p)
  std::vector<StrichartzResult> runs;      // one per eps
  bool accuracy_degraded = false;
};

ScalingSweep strichartz_scaling_sweep(const StrichartzProfile& f,
                                      const std::vector<double>& eps,
                                      const std::vector<double>& p,
                                      const StrichartzOptions& opt);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rotmhd
