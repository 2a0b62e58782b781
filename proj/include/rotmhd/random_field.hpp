// Seeded random divergence-free initial data.
#pragma once

#include <cstdint>
#include <random>

#include "rotmhd/field.hpp"

namespace rotmhd {

// Modes with k_min <= |xi| <= k_max, |xi_h| >= min_h and |xi_3| >= min_v get
// independent complex Gaussian coefficients with variance |xi|^slope
// (slope = -4 by default); the field is then made Hermitian, Leray-projected
// and 2/3-dealiased.  The exclusions keep the data in the homogeneous spaces
// with negative exponents.  Each field is finally rescaled to L^2 norm l2
// (l2 = 0 keeps the raw draw).
struct RandomFieldSpec {
  double k_min = 0.0;
  double k_max = 1e300;
  double min_h = 0.0;
  double min_v = 0.0;
  double slope = -4.0;
  double l2 = 1.0;
};

SpectralField random_solenoidal_field(const Grid& g, const RandomFieldSpec& spec,
                                      std::mt19937_64& rng);
StateVector random_state(const Grid& g, const RandomFieldSpec& spec,
                         std::uint64_t seed);

}  // namespace rotmhd
