// Spectral and physical representations of 3-component vector fields, and the
// (u, b) state pair.
#pragma once

#include <array>
#include <vector>

#include "rotmhd/grid.hpp"

namespace rotmhd {

// Fourier coefficients (unnormalised forward DFT) of a 3-component field.
// Scalars such as the pressure are stored in component 0.
struct SpectralField {
  Grid grid;
  std::array<std::vector<cplx>, 3> comp;

  explicit SpectralField(const Grid& g);

  std::size_t size() const { return grid.size(); }
  cplx& at(int c, std::size_t idx) { return comp[c][idx]; }
  const cplx& at(int c, std::size_t idx) const { return comp[c][idx]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  SpectralField& operator*=(cplx a);

  // y += a * x
  void axpy(cplx a, const SpectralField& x);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField x);

// Real samples on the grid, one array per component.
struct PhysicalField {
  Grid grid;
  std::array<std::vector<double>, 3> comp;

  explicit PhysicalField(const Grid& g);
};

// U = (u, b): velocity and magnetic field on a shared grid.
struct StateVector {
  SpectralField u;
  SpectralField b;

  explicit StateVector(const Grid& g) : u(g), b(g) {}
  StateVector(SpectralField u_, SpectralField b_);

  const Grid& grid() const { return u.grid; }

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(double a);
  void axpy(cplx a, const StateVector& x);

  // Six-vector (u1,u2,u3,b1,b2,b3) at one mode.
  std::array<cplx, 6> mode(std::size_t idx) const;
  void set_mode(std::size_t idx, const std::array<cplx, 6>& v);
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(double a, StateVector x);

// max_k |u_hat(k) - conj(u_hat(-k))| / max_k |u_hat(k)|; 0 for real fields.
double hermitian_defect(const SpectralField& f);
// Replaces each coefficient pair by its Hermitian-symmetric part.
void symmetrize(SpectralField& f);

}  // namespace rotmhd
