// Frequency cutoff Psi, the split U0 = Ubar0 + Utilde0 and the parameter
// schedule tying R, r, alpha and eps together.
#pragma once

#include <string>

#include "rotmhd/field.hpp"
#include "rotmhd/linear.hpp"

namespace rotmhd {

// plateau(|xi|/R) (1 - plateau(2|xi_h|/r)) (1 - plateau(2|xi_3|/r)):
// equals 1 on the band (see in_band) and vanishes outside the band (r/2, 2R).
double psi(const Freq& xi, double r, double R);

// r <= |xi_h|, |xi_3|, |xi| <= R.
bool in_band(const Freq& xi, double r, double R);

struct SplitResult {
  StateVector low;   // Psi(D) U0
  StateVector high;  // U0 - Psi(D) U0
  double high_h0s = 0.0;
  double data_y_norm = 0.0;
  // ||high||_{H^{0,s}} R^{beta eta} / ||U0||_{Y_{s,eta}}: empirical constant of
  // the data bound.
  double empirical_constant = 0.0;
};

SplitResult split_initial_data(const StateVector& U0, double r, double R,
                               const ModelParams& p);

struct CutoffParams {
  double r = 0.0;
  double R = 0.0;
  double beta = 1.0;
  double eta = 1.0;
  double s = 1.0;
  double eps = 0.0;
  double alpha = 0.0;
  double schedule_constant = 1.0;  // K below
  double alpha0 = 0.0;
  bool alpha_admissible = false;   // alpha <= alpha0
  double exponent_low = 0.0;       // 1/4 - alpha (3/4 + (7 + 8 beta + s)/(beta eta))
  double exponent_high = 0.0;      // 1/4 - alpha (7/4 + (11 + 13 beta + 2 s)/(beta eta))
  bool exponents_positive = false;
  bool bootstrap_margin = false;   // exponent_low > 2 alpha
};

double admissible_alpha(double beta, double eta, double s);

// R = K^{1/(beta eta)} eps^{-alpha/(beta eta)}, r = R^{-beta}.
CutoffParams schedule_parameters(double eps, double alpha, double beta, double eta,
                                 double s, double schedule_constant = 1.0);

// Torus resolution check 2 pi / box <= r / 4 along every axis; returns an
// empty string when satisfied, otherwise the violated constraint.
std::string check_band_resolution(const Grid& g, double r);

}  // namespace rotmhd
