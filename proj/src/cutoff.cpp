#include "rotmhd/cutoff.hpp"

#include <cmath>
#include <numbers>

#include "rotmhd/errors.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/smooth.hpp"

namespace rotmhd {

double psi(const Freq& xi, double r, double R) {
  const double kh = std::hypot(xi[0], xi[1]);
  const double k = std::hypot(kh, xi[2]);
  return plateau(k / R) * (1.0 - plateau(2.0 * kh / r)) *
         (1.0 - plateau(2.0 * std::abs(xi[2]) / r));
}

bool in_band(const Freq& xi, double r, double R) {
  const double kh = std::hypot(xi[0], xi[1]);
  const double k = std::hypot(kh, xi[2]);
  const double k3 = std::abs(xi[2]);
  return kh >= r && kh <= R && k3 >= r && k3 <= R && k >= r && k <= R;
}

SplitResult split_initial_data(const StateVector& U0, double r, double R,
                               const ModelParams& p) {
  if (!(r > 0.0) || !(r < R)) throw ParameterError("split_initial_data: need 0 < r < R");
  const Grid& g = U0.grid();
  SplitResult out{U0, U0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = psi(g.frequency(i), r, R);
    for (int c = 0; c < 3; ++c) {
      out.low.u.comp[c][i] *= w;
      out.low.b.comp[c][i] *= w;
      out.high.u.comp[c][i] = U0.u.comp[c][i] - out.low.u.comp[c][i];
      out.high.b.comp[c][i] = U0.b.comp[c][i] - out.low.b.comp[c][i];
    }
  }
  out.high_h0s = h0s_norm(out.high, p.s);
  out.data_y_norm = y_norm(U0, p.s, p.eta);
  if (out.data_y_norm > 0.0) {
    out.empirical_constant =
        out.high_h0s * std::pow(R, p.beta * p.eta) / out.data_y_norm;
  }
  return out;
}

double admissible_alpha(double beta, double eta, double s) {
  return beta * eta / (11.0 * beta * eta + 44.0 + 52.0 * beta + 8.0 * s);
}

CutoffParams schedule_parameters(double eps, double alpha, double beta, double eta,
                                 double s, double schedule_constant) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("schedule: eps must lie in (0, 1)");
  if (!(beta >= 1.0)) throw ParameterError("schedule: beta must be >= 1");
  if (!(eta > 0.0)) throw ParameterError("schedule: eta must be > 0");
  if (!(s > 0.5)) throw ParameterError("schedule: s must be > 1/2");
  if (!(alpha >= 0.0)) throw ParameterError("schedule: alpha must be >= 0");
  if (!(schedule_constant > 0.0)) throw ParameterError("schedule: schedule_constant must be > 0");
  CutoffParams c;
  c.beta = beta;
  c.eta = eta;
  c.s = s;
  c.eps = eps;
  c.alpha = alpha;
  c.schedule_constant = schedule_constant;
  const double be = beta * eta;
  c.R = std::pow(schedule_constant, 1.0 / be) * std::pow(eps, -alpha / be);
  c.r = std::pow(c.R, -beta);
  if (!(c.r < c.R)) {
    throw ParameterError("schedule: R must exceed 1 so that r = R^-beta < R "
                         "(increase schedule_constant or alpha)");
  }
  c.alpha0 = admissible_alpha(beta, eta, s);
  c.alpha_admissible = alpha <= c.alpha0;
  c.exponent_low = 0.25 - alpha * (0.75 + (7.0 + 8.0 * beta + s) / be);
  c.exponent_high = 0.25 - alpha * (1.75 + (11.0 + 13.0 * beta + 2.0 * s) / be);
  c.exponents_positive = c.exponent_low > 0.0 && c.exponent_high > 0.0;
  c.bootstrap_margin = c.exponent_low > 2.0 * alpha;
  return c;
}

std::string check_band_resolution(const Grid& g, double r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (two_pi / g.box_h() > r / 4.0) {
    return "resolution: 2*pi/box_h = " + std::to_string(two_pi / g.box_h()) +
           " exceeds r/4 = " + std::to_string(r / 4.0);
  }
  if (two_pi / g.box_v() > r / 4.0) {
    return "resolution: 2*pi/box_v = " + std::to_string(two_pi / g.box_v()) +
           " exceeds r/4 = " + std::to_string(r / 4.0);
  }
  return {};
}

}  // namespace rotmhd
