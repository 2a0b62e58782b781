#include "rotmhd/smooth.hpp"

#include <cmath>

namespace rotmhd {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double plateau(double x) { return 1.0 - smooth_step(std::abs(x) - 1.0); }

}  // namespace rotmhd
