#include "rotmhd/random_field.hpp"

#include <cmath>

#include "rotmhd/operators.hpp"

namespace rotmhd {

SpectralField random_solenoidal_field(const Grid& g, const RandomFieldSpec& spec,
                                      std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [x1, x2, x3] = g.frequency(i);
    const double kh = std::hypot(x1, x2);
    const double k = std::hypot(kh, x3);
    // Draw unconditionally so the stream does not depend on the band.
    std::array<cplx, 3> z;
    for (auto& c : z) {
      const double re = normal(rng);
      const double im = normal(rng);
      c = cplx(re, im);
    }
    if (k == 0.0 || k < spec.k_min || k > spec.k_max || kh < spec.min_h ||
        std::abs(x3) < spec.min_v || !g.retained(i)) {
      continue;
    }
    const double amp = std::pow(k, 0.5 * spec.slope);
    for (int c = 0; c < 3; ++c) v.comp[c][i] = amp * z[c];
  }
  symmetrize(v);
  v = project_leray(v);
  dealias(v);
  const double n = l2_norm(v);
  if (spec.l2 > 0.0 && n > 0.0) v *= spec.l2 / n;
  return v;
}

StateVector random_state(const Grid& g, const RandomFieldSpec& spec,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SpectralField u = random_solenoidal_field(g, spec, rng);
  SpectralField b = random_solenoidal_field(g, spec, rng);
  return StateVector(std::move(u), std::move(b));
}

}  // namespace rotmhd
