// Anisotropic Sobolev norms (Fourier weights), anisotropic Lebesgue norms
// (physical-space Riemann sums) and the Y_{s,eta} data norm.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rotmhd/field.hpp"

namespace rotmhd {

struct SobolevSpec {
  double sigma_h = 0.0;
  double sigma_v = 0.0;
  // |xi_h|^{2 sigma_h} instead of (1 + |xi_h|^2)^{sigma_h}; same for vertical.
  bool homogeneous_h = false;
  bool homogeneous_v = false;
};

struct SobolevResult {
  double value = 0.0;
  // L^2 mass of the modes dropped because a homogeneous weight with negative
  // exponent is singular there (xi_h = 0 column or xi_3 = 0 plane).
  double excluded_l2 = 0.0;
  std::string warning;
};

SobolevResult aniso_sobolev(const SpectralField& v, const SobolevSpec& spec);
double aniso_sobolev_norm(const SpectralField& v, double sigma_h, double sigma_v,
                          bool homogeneous_h = false);
double h0s_norm(const SpectralField& v, double s);
double h0s_norm(const StateVector& U, double s);

// Euclidean magnitude of the vector field, vertical L^{q_v} norm first, then
// horizontal L^{q_h}.  q in {1, 2, 4, inf}; anything else is a ParameterError.
double aniso_lebesgue_norm(const SpectralField& v, double q_h, double q_v);
double aniso_lebesgue_norm(const PhysicalField& v, double q_h, double q_v);

// max of the three constituent norms
//   dot H^{-eta,s},  L^2_h dot H^{-eta}_v,  H^{eta,eta+s}.
double y_norm(const SpectralField& v, double s, double eta);
double y_norm(const StateVector& U, double s, double eta);

struct NormReport {
  double l2 = 0.0;
  double h0s = 0.0;
  std::map<std::pair<double, double>, double> hs1s2;
  std::map<std::pair<double, double>, double> aniso_lebesgue;
};

NormReport norm_report(const SpectralField& v, double s,
                       const std::vector<std::pair<double, double>>& sobolev,
                       const std::vector<std::pair<double, double>>& lebesgue);

}  // namespace rotmhd
