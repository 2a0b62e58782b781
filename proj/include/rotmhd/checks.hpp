// Verification suites shared by the `check` subcommand and the acceptance
// driver.  Each suite reports named metrics with their thresholds; a suite
// passes when every metric does.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotmhd/linear.hpp"
#include "rotmhd/solver.hpp"

namespace rotmhd {

struct CheckMetric {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;  // value <= threshold when true, value >= threshold otherwise
  bool pass = false;
};

struct CheckSuite {
  std::string name;
  std::vector<CheckMetric> metrics;
  double seconds = 0.0;

  bool pass() const;
  void add(const std::string& metric, double value, double threshold, bool upper = true);
};

// Closed-form eigenvalues, eigenvectors, |det D| and Cramer reconstruction
// against a numeric eigensolver on random frequencies of the band (r, R).
CheckSuite check_eigen_structure(int trials, double r, double R, double eps, double alpha,
                                 std::uint64_t seed);

// eigen_propagator against expm_oracle on random (xi, t), t in [0, 10/eps],
// plus the modulus decay law.
CheckSuite check_propagator(int trials, double r, double R, double eps, double alpha,
                            std::uint64_t seed);

// The four exact cancellations of the energy method on random dealiased
// states, each relative to its natural scale.
CheckSuite check_cancellations(int states, int n_h, int n_v, std::uint64_t seed);

// Ladder reconstruction, two-apart disjointness, dyadic versus integral
// H^{0,s} norms over several fields and resolutions, Bony reconstruction.
CheckSuite check_littlewood_paley(int fields, double s, std::uint64_t seed);

// Energy residual of direct runs at dt, dt/2, dt/4 (dt largest first); the
// residual at `dt_target` (one of them) is measured against energy_tol.
struct EnergyCheckOptions {
  std::vector<double> dt{4e-3, 2e-3, 1e-3};
  double dt_target = 1e-3;
  double energy_tol = 1e-6;
  double min_order = 3.0;
};

CheckSuite check_energy_identity(const StateVector& U0, const SolverConfig& cfg,
                                 const ModelParams& p, const EnergyCheckOptions& opt = {});

// Coupled-split against direct run: relative H^{0,s} distance at t_end.
CheckSuite check_split_consistency(const StateVector& U0, const SolverConfig& cfg,
                                   const ModelParams& p, double tol = 1e-6);

}  // namespace rotmhd
