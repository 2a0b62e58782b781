// Mode-wise differential operators, Leray projection, dealiasing and the
// pseudo-spectral quadratic products built on them.
#pragma once

#include <vector>

#include "rotmhd/field.hpp"

namespace rotmhd {

// i * xi_axis * v_hat, axis in {0,1,2}.
SpectralField derivative(const SpectralField& v, int axis);
// Scalar i xi . v_hat, returned as the coefficients of one component.
std::vector<cplx> divergence(const SpectralField& v);
// Gradient of the scalar stored in component 0 of `scalar`.
SpectralField gradient(const SpectralField& scalar);

// v_hat - xi (xi . v_hat) / |xi|^2; the xi = 0 mode is left unchanged.
SpectralField project_leray(const SpectralField& v);
StateVector project_leray(const StateVector& U);
// Gradient part xi (xi . v_hat) / |xi|^2, i.e. v - project_leray(v).
SpectralField gradient_part(const SpectralField& v);

// max over modes of |xi . v_hat| / (|xi| |v_hat|), relative to the largest
// coefficient so that round-off on tiny modes is not amplified.
double divergence_defect(const SpectralField& v);
// Throws InvariantError when divergence_defect exceeds tol.
void require_divergence_free(const SpectralField& v, const char* where,
                             double tol = 1e-10);

// Zero every mode outside the 2/3-rule box.
void dealias(SpectralField& v);
void dealias(StateVector& U);
bool is_dealiased(const SpectralField& v);

// Real L^2 inner product <a, b> = int a . b dx and the norm it induces.
double inner_product(const SpectralField& a, const SpectralField& b);
double inner_product(const StateVector& a, const StateVector& b);
double l2_norm(const SpectralField& v);
double l2_norm(const StateVector& U);
// ||grad_h v||^2_{L^2}.
double horizontal_gradient_sq(const SpectralField& v);
double horizontal_gradient_sq(const StateVector& U);

// Dealiased transform of the pointwise product a_i * b_j of two components.
std::vector<cplx> product(const SpectralField& a, int i, const SpectralField& b,
                          int j);
// Dealiased (a . grad) b computed from physical-space products.
SpectralField advection(const SpectralField& a, const SpectralField& b);

// Quadratic terms of the MHD system in divergence form, for divergence-free
// u and b:  first = u.grad u - b.grad b,  second = u.grad b - b.grad u.
// Products are formed in physical space and the result is 2/3-dealiased.
StateVector quadratic_terms(const StateVector& U);

// e3 x v = (-v2, v1, 0).
SpectralField rotate_e3(const SpectralField& v);

// Pressure of the rotating MHD system at Rossby number eps (scalar in
// component 0; xi = 0 mode zero):
//   p_hat = |xi|^-2 [ -xi_i xi_j (u_i u_j - b_i b_j)^ + (i/eps)(xi2 u1 - xi1 u2) ]
// so that grad p is the gradient part of -(u.grad u - b.grad b) - e3 x u / eps.
// eps = +inf switches the rotation term off.
SpectralField pressure_from_state(const StateVector& U, double eps);

}  // namespace rotmhd
