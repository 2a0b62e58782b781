// C-infinity transition and plateau functions shared by the dyadic bumps and
// the frequency cutoff.
#pragma once

namespace rotmhd {

// 0 for t <= 0, 1 for t >= 1, f(t) / (f(t) + f(1 - t)) with f(t) = exp(-1/t)
// in between.
double smooth_step(double t);

// Plateau: 1 on [0, 1], 0 outside [0, 2], smooth and even.
double plateau(double x);

}  // namespace rotmhd
