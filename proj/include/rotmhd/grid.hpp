// Anisotropic periodic grid: n_h x n_h x n_v samples on a box of periods
// (box_h, box_h, box_v).  The torus stands in for R^3; frequency resolution
// is 2*pi/box per axis.
//
// Storage order is row-major over (i1, i2, i3) with i3 (vertical) fastest.
// Mode index i maps to the signed wavenumber k in [-n/2, n/2) and to the
// frequency xi = 2*pi*k/box, evaluated directly per mode.
//
// Fourier normalisation: forward transform unscaled, inverse scaled by 1/N
// (N = n_h*n_h*n_v).  With that convention Parseval reads
//     ||u||_{L^2}^2 = (V / N^2) * sum_k |u_hat(k)|^2,   V = box_h^2 * box_v,
// and parseval_weight() returns V / N^2.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace rotmhd {

using cplx = std::complex<double>;

class Grid {
 public:
  Grid(int n_h, int n_v, double box_h, double box_v);

  int n_h() const { return n_h_; }
  int n_v() const { return n_v_; }
  double box_h() const { return box_h_; }
  double box_v() const { return box_v_; }

  std::size_t size() const {
    return static_cast<std::size_t>(n_h_) * n_h_ * n_v_;
  }
  std::size_t index(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * n_h_ + i2) * n_v_ + i3;
  }
  std::array<int, 3> unravel(std::size_t idx) const {
    const int i3 = static_cast<int>(idx % n_v_);
    const std::size_t rest = idx / n_v_;
    return {static_cast<int>(rest / n_h_), static_cast<int>(rest % n_h_), i3};
  }

  int wavenumber_h(int i) const { return i < n_h_ / 2 ? i : i - n_h_; }
  int wavenumber_v(int i) const { return i < n_v_ / 2 ? i : i - n_v_; }

  double xi_h(int i) const { return freq_h_[i]; }
  double xi_v(int i) const { return freq_v_[i]; }
  std::array<double, 3> frequency(std::size_t idx) const {
    const auto [i1, i2, i3] = unravel(idx);
    return {freq_h_[i1], freq_h_[i2], freq_v_[i3]};
  }

  // Frequencies seen by odd operators (derivatives, Leray projection, the
  // linear symbol): the Nyquist index has no partner of opposite sign, so it
  // is assigned frequency 0 there to keep every operator real-preserving.
  double op_xi_h(int i) const { return 2 * i == n_h_ ? 0.0 : freq_h_[i]; }
  double op_xi_v(int i) const { return 2 * i == n_v_ ? 0.0 : freq_v_[i]; }
  std::array<double, 3> op_frequency(std::size_t idx) const {
    const auto [i1, i2, i3] = unravel(idx);
    return {op_xi_h(i1), op_xi_h(i2), op_xi_v(i3)};
  }

  // Index of the mode -k.
  std::size_t mirror(std::size_t idx) const {
    const auto [i1, i2, i3] = unravel(idx);
    return index(mirror_h_[i1], mirror_h_[i2], mirror_v_[i3]);
  }

  double volume() const { return box_h_ * box_h_ * box_v_; }
  double dx_h() const { return box_h_ / n_h_; }
  double dx_v() const { return box_v_ / n_v_; }
  double cell_volume() const { return volume() / static_cast<double>(size()); }
  double parseval_weight() const {
    const double n = static_cast<double>(size());
    return volume() / (n * n);
  }

  // Largest |k| kept by the 2/3 rule along each axis (3|k| < n).
  int dealias_kmax_h() const { return (n_h_ - 1) / 3; }
  int dealias_kmax_v() const { return (n_v_ - 1) / 3; }
  bool retained(std::size_t idx) const;

  double x_h(int i) const { return dx_h() * i; }
  double x_v(int i) const { return dx_v() * i; }

  bool operator==(const Grid& o) const {
    return n_h_ == o.n_h_ && n_v_ == o.n_v_ && box_h_ == o.box_h_ &&
           box_v_ == o.box_v_;
  }

 private:
  int n_h_;
  int n_v_;
  double box_h_;
  double box_v_;
  std::vector<double> freq_h_;
  std::vector<double> freq_v_;
  std::vector<int> mirror_h_;
  std::vector<int> mirror_v_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace rotmhd
