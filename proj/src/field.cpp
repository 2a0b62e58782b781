#include "rotmhd/field.hpp"

#include <algorithm>
#include <cmath>

namespace rotmhd {

SpectralField::SpectralField(const Grid& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), cplx{});
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid, o.grid, "SpectralField::+=");
  for (int c = 0; c < 3; ++c) {
    auto& d = comp[c];
    const auto& s = o.comp[c];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid, o.grid, "SpectralField::-=");
  for (int c = 0; c < 3; ++c) {
    auto& d = comp[c];
    const auto& s = o.comp[c];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s[i];
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& c : comp)
    for (auto& v : c) v *= a;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& c : comp)
    for (auto& v : c) v *= a;
  return *this;
}

void SpectralField::axpy(cplx a, const SpectralField& x) {
  require_same_grid(grid, x.grid, "SpectralField::axpy");
  for (int c = 0; c < 3; ++c) {
    auto& d = comp[c];
    const auto& s = x.comp[c];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += a * s[i];
  }
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField x) { return x *= a; }

PhysicalField::PhysicalField(const Grid& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), 0.0);
}

StateVector::StateVector(SpectralField u_, SpectralField b_)
    : u(std::move(u_)), b(std::move(b_)) {
  require_same_grid(u.grid, b.grid, "StateVector");
}

StateVector& StateVector::operator+=(const StateVector& o) {
  u += o.u;
  b += o.b;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  u -= o.u;
  b -= o.b;
  return *this;
}

StateVector& StateVector::operator*=(double a) {
  u *= a;
  b *= a;
  return *this;
}

void StateVector::axpy(cplx a, const StateVector& x) {
  u.axpy(a, x.u);
  b.axpy(a, x.b);
}

std::array<cplx, 6> StateVector::mode(std::size_t idx) const {
  return {u.comp[0][idx], u.comp[1][idx], u.comp[2][idx],
          b.comp[0][idx], b.comp[1][idx], b.comp[2][idx]};
}

void StateVector::set_mode(std::size_t idx, const std::array<cplx, 6>& v) {
  for (int c = 0; c < 3; ++c) {
    u.comp[c][idx] = v[c];
    b.comp[c][idx] = v[c + 3];
  }
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(double a, StateVector x) { return x *= a; }

double hermitian_defect(const SpectralField& f) {
  double defect = 0.0;
  double scale = 0.0;
  for (const auto& c : f.comp) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      defect = std::max(defect, std::abs(c[i] - std::conj(c[f.grid.mirror(i)])));
      scale = std::max(scale, std::abs(c[i]));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

void symmetrize(SpectralField& f) {
  for (auto& c : f.comp) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t m = f.grid.mirror(i);
      if (m < i) continue;
      const cplx avg = 0.5 * (c[i] + std::conj(c[m]));
      c[i] = avg;
      c[m] = std::conj(avg);
    }
  }
}

}  // namespace rotmhd
