#include "rotmhd/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rotmhd/errors.hpp"

namespace rotmhd {

Grid::Grid(int n_h, int n_v, double box_h, double box_v)
    : n_h_(n_h), n_v_(n_v), box_h_(box_h), box_v_(box_v) {
  if (n_h < 4 || n_v < 4 || n_h % 2 != 0 || n_v % 2 != 0) {
    throw ConfigError("grid: n_h and n_v must be even and >= 4 (got " +
                      std::to_string(n_h) + ", " + std::to_string(n_v) + ")");
  }
  if (!(box_h > 0.0) || !(box_v > 0.0) || !std::isfinite(box_h) ||
      !std::isfinite(box_v)) {
    throw ConfigError("grid: box lengths must be positive and finite");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  freq_h_.resize(n_h);
  mirror_h_.resize(n_h);
  for (int i = 0; i < n_h; ++i) {
    freq_h_[i] = two_pi * wavenumber_h(i) / box_h;
    mirror_h_[i] = (n_h - i) % n_h;
  }
  freq_v_.resize(n_v);
  mirror_v_.resize(n_v);
  for (int i = 0; i < n_v; ++i) {
    freq_v_[i] = two_pi * wavenumber_v(i) / box_v;
    mirror_v_[i] = (n_v - i) % n_v;
  }
}

bool Grid::retained(std::size_t idx) const {
  const auto [i1, i2, i3] = unravel(idx);
  return std::abs(wavenumber_h(i1)) <= dealias_kmax_h() &&
         std::abs(wavenumber_h(i2)) <= dealias_kmax_h() &&
         std::abs(wavenumber_v(i3)) <= dealias_kmax_v();
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    throw ConfigError(std::string(where) + ": operands live on different grids");
  }
}

}  // namespace rotmhd
