// FFTW-backed transforms between physical samples and SpectralField.
//
// Plans are created once per grid shape with FFTW_ESTIMATE (so the chosen
// algorithm, and therefore every output bit, does not depend on timing) and
// executed through the new-array interface, which is thread-safe.
#pragma once

#include <span>
#include <vector>

#include "rotmhd/field.hpp"

namespace rotmhd {

// Raw 3D DFTs on complex arrays of grid.size() entries.
void dft_forward(const Grid& g, std::span<const cplx> in, std::span<cplx> out);
// Includes the 1/N factor.
void dft_inverse(const Grid& g, std::span<const cplx> in, std::span<cplx> out);

// Transforms of two real arrays through one complex DFT (a + i b).
void forward_real_pair(const Grid& g, std::span<const double> a,
                       std::span<const double> b, std::span<cplx> a_hat,
                       std::span<cplx> b_hat);
// Requires Hermitian-symmetric inputs; returns the real parts.
void inverse_real_pair(const Grid& g, std::span<const cplx> a_hat,
                       std::span<const cplx> b_hat, std::span<double> a,
                       std::span<double> b);

std::vector<cplx> forward_scalar(const Grid& g, std::span<const double> a);
std::vector<double> inverse_scalar(const Grid& g, std::span<const cplx> a_hat);

// Throws ConfigError when the sample shape does not match the grid.
SpectralField forward_transform(const PhysicalField& f);
PhysicalField inverse_transform(const SpectralField& f);

}  // namespace rotmhd
