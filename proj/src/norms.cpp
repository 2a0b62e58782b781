#include "rotmhd/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"
#include "rotmhd/operators.hpp"

namespace rotmhd {
namespace {

// Weight for one direction; NaN marks a mode where the weight is singular.
double direction_weight(double xi2, double sigma, bool homogeneous) {
  if (!homogeneous) return std::pow(1.0 + xi2, sigma);
  if (sigma == 0.0) return 1.0;
  if (xi2 == 0.0) {
    return sigma > 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return std::pow(xi2, sigma);
}

bool valid_q(double q) { return q == 1.0 || q == 2.0 || q == 4.0 || std::isinf(q); }

double accumulate(double acc, double x, double q) {
  if (std::isinf(q)) return std::max(acc, x);
  if (q == 1.0) return acc + x;
  if (q == 2.0) return acc + x * x;
  return acc + (x * x) * (x * x);
}

double finish(double acc, double weight, double q) {
  if (std::isinf(q)) return acc;
  return std::pow(acc * weight, 1.0 / q);
}

}  // namespace

SobolevResult aniso_sobolev(const SpectralField& v, const SobolevSpec& spec) {
  const Grid& g = v.grid;
  std::vector<double> wh(g.n_h()), wv(g.n_v());
  double sum = 0.0;
  double dropped = 0.0;
  double total = 0.0;
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double xh2 = g.xi_h(i1) * g.xi_h(i1) + g.xi_h(i2) * g.xi_h(i2);
      const double a = direction_weight(xh2, spec.sigma_h, spec.homogeneous_h);
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        const double m = std::norm(v.comp[0][idx]) + std::norm(v.comp[1][idx]) +
                         std::norm(v.comp[2][idx]);
        if (m == 0.0) continue;
        total += m;
        const double x3 = g.xi_v(i3);
        const double w = a * direction_weight(x3 * x3, spec.sigma_v, spec.homogeneous_v);
        if (std::isnan(w)) {
          dropped += m;
        } else {
          sum += w * m;
        }
      }
    }
  }
  SobolevResult r;
  r.value = std::sqrt(sum * g.parseval_weight());
  r.excluded_l2 = std::sqrt(dropped * g.parseval_weight());
  if (dropped > 1e-24 * total) {
    r.warning = "homogeneous weight with negative exponent: modes on the singular set "
                "excluded (L2 mass " + std::to_string(r.excluded_l2) + ")";
  }
  return r;
}

double aniso_sobolev_norm(const SpectralField& v, double sigma_h, double sigma_v,
                          bool homogeneous_h) {
  return aniso_sobolev(v, {sigma_h, sigma_v, homogeneous_h, false}).value;
}

double h0s_norm(const SpectralField& v, double s) {
  return aniso_sobolev_norm(v, 0.0, s);
}

double h0s_norm(const StateVector& U, double s) {
  return std::hypot(h0s_norm(U.u, s), h0s_norm(U.b, s));
}

double aniso_lebesgue_norm(const PhysicalField& v, double q_h, double q_v) {
  if (!valid_q(q_h) || !valid_q(q_v)) {
    throw ParameterError("aniso_lebesgue_norm: exponents must be 1, 2, 4 or inf");
  }
  const Grid& g = v.grid;
  double outer = 0.0;
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      double inner = 0.0;
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        const double m = std::sqrt(v.comp[0][idx] * v.comp[0][idx] +
                                   v.comp[1][idx] * v.comp[1][idx] +
                                   v.comp[2][idx] * v.comp[2][idx]);
        inner = accumulate(inner, m, q_v);
      }
      outer = accumulate(outer, finish(inner, g.dx_v(), q_v), q_h);
    }
  }
  return finish(outer, g.dx_h() * g.dx_h(), q_h);
}

double aniso_lebesgue_norm(const SpectralField& v, double q_h, double q_v) {
  return aniso_lebesgue_norm(inverse_transform(v), q_h, q_v);
}

double y_norm(const SpectralField& v, double s, double eta) {
  const double a = aniso_sobolev(v, {-eta, s, true, false}).value;
  const double b = aniso_sobolev(v, {0.0, -eta, false, true}).value;
  const double c = aniso_sobolev(v, {eta, eta + s, false, false}).value;
  return std::max({a, b, c});
}

double y_norm(const StateVector& U, double s, double eta) {
  return std::hypot(y_norm(U.u, s, eta), y_norm(U.b, s, eta));
}

NormReport norm_report(const SpectralField& v, double s,
                       const std::vector<std::pair<double, double>>& sobolev,
                       const std::vector<std::pair<double, double>>& lebesgue) {
  NormReport r;
  r.l2 = l2_norm(v);
  r.h0s = h0s_norm(v, s);
  for (const auto& [a, b] : sobolev) r.hs1s2[{a, b}] = aniso_sobolev_norm(v, a, b);
  if (!lebesgue.empty()) {
    const PhysicalField p = inverse_transform(v);
    for (const auto& [a, b] : lebesgue) r.aniso_lebesgue[{a, b}] = aniso_lebesgue_norm(p, a, b);
  }
  return r;
}

}  // namespace rotmhd
