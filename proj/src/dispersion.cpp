#include "rotmhd/dispersion.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <math.h>
#include <numbers>
#include <random>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/parallel.hpp"

namespace rotmhd {
namespace {

constexpr double kPi = std::numbers::pi;

// Full Gauss-Legendre rule on [-1, 1].
template <int N>
struct Rule {
  std::array<double, N> x{};
  std::array<double, N> w{};
  Rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    int k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        x[k] = 0.0;
        w[k++] = wt[i];
        continue;
      }
      x[k] = -a[i];
      w[k++] = wt[i];
      x[k] = a[i];
      w[k++] = wt[i];
    }
  }
};

const Rule<20>& rule20() {
  static const Rule<20> r;
  return r;
}
const Rule<12>& rule12() {
  static const Rule<12> r;
  return r;
}

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

double dispersion_value(Branch b, double k) {
  return b == Branch::A ? dispersion_A(k) : dispersion_B(k);
}

double psi_radial(double rho, double xi3, double r, double R) {
  return psi({rho, 0.0, xi3}, r, R);
}

// Largest |d Gamma / d rho| for rho in [a, b].
double max_radial_slope(Branch br, double xi3, double a, double b) {
  double m = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double rho = a + (b - a) * i / 64.0;
    if (rho <= 0.0) continue;
    m = std::max(m, std::abs(radial_phase_slope(br, rho, xi3)));
  }
  return m;
}

struct Sum {
  cplx value;
  double l1 = 0.0;
};

template <class F>
Sum composite_1d(const F& f, double a, double b, int panels) {
  const auto& q = rule20();
  const double h = (b - a) / panels;
  Sum s;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 20; ++i) {
      const cplx v = f(mid + 0.5 * h * q.x[i]) * (0.5 * h * q.w[i]);
      s.value += v;
      s.l1 += std::abs(v);
    }
  }
  return s;
}

template <class F>
Sum composite_2d(const F& f, double a, double b, int panels) {
  const auto& q = rule12();
  const double h = (b - a) / panels;
  Sum s;
  for (int p1 = 0; p1 < panels; ++p1) {
    const double m1 = a + (p1 + 0.5) * h;
    for (int i = 0; i < 12; ++i) {
      const double x1 = m1 + 0.5 * h * q.x[i];
      const double w1 = 0.5 * h * q.w[i];
      for (int p2 = 0; p2 < panels; ++p2) {
        const double m2 = a + (p2 + 0.5) * h;
        for (int j = 0; j < 12; ++j) {
          const cplx v = f(x1, m2 + 0.5 * h * q.x[j]) * (w1 * 0.5 * h * q.w[j]);
          s.value += v;
          s.l1 += std::abs(v);
        }
      }
    }
  }
  return s;
}

template <class Eval>
QuadResult refine(const Eval& eval, int start, int max_panels, double tol, double floor) {
  int n = std::max(2, start);
  Sum prev = eval(n);
  QuadResult out;
  for (;;) {
    if (2 * n > max_panels) {
      out.value = prev.value;
      out.converged = false;
      out.panels = n;
      if (out.error == 0.0) out.error = std::abs(prev.value);
      return out;
    }
    const Sum next = eval(2 * n);
    out.error = std::abs(next.value - prev.value);
    out.value = next.value;
    out.panels = 2 * n;
    if (out.error <= tol * std::max({std::abs(next.value), 1e-6 * next.l1, floor})) return out;
    prev = next;
    n *= 2;
  }
}

double rho_upper(double xi3, double R) {
  const double top = 4.0 * R * R - xi3 * xi3;
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

// Stratified samples of the unit square; column k is a permutation.
std::vector<std::array<double, 2>> latin_hypercube(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> p0(n), p1(n);
  for (int i = 0; i < n; ++i) p0[i] = p1[i] = i;
  std::shuffle(p0.begin(), p0.end(), rng);
  std::shuffle(p1.begin(), p1.end(), rng);
  std::vector<std::array<double, 2>> out(n);
  for (int i = 0; i < n; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    out[i] = {(p0[i] + a) / n, (p1[i] + b) / n};
  }
  return out;
}

struct SampledSup {
  double sup = 0.0;
  double error = 0.0;
  bool degraded = false;
};

SampledSup sampled_sup(Branch br, double r, double R, double theta, double tau,
                       const std::vector<std::array<double, 2>>& pts, double tol) {
  std::vector<QuadResult> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const double xi3 = 0.5 * r + pts[i][0] * (2.0 * R - 0.5 * r);
    const double w = max_radial_slope(br, xi3, 0.5 * r, rho_upper(xi3, R));
    const double z = pts[i][1] * (1.1 * theta * w + 1.0 / R);
    KernelOptions opt;
    opt.tol = tol;
    opt.method = KernelMethod::radial;
    res[i] = kernel(theta, tau, {z, 0.0}, xi3, r, R, br, 1, opt);
  });
  SampledSup out;
  for (const auto& q : res) {
    out.sup = std::max(out.sup, std::abs(q.value));
    out.error = std::max(out.error, q.error);
    out.degraded = out.degraded || !q.converged;
  }
  return out;
}

}  // namespace

const char* branch_name(Branch b) { return b == Branch::A ? "A" : "B"; }

double phase(Branch b, const Freq& xi) {
  const double k = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  if (k == 0.0) throw DegenerateModeError("phase: xi = 0");
  return xi[2] * dispersion_value(b, k);
}

double phase_slope(Branch b, const Freq& xi) {
  const double k = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  if (k == 0.0) throw DegenerateModeError("phase_slope: xi = 0");
  const double S = std::sqrt(4.0 * k * k + 1.0);
  const double top = b == Branch::A ? 1.0 + S : 1.0 - S;
  return xi[1] * xi[2] * top / (2.0 * k * k * k * S);
}

double phase_slope_derivative(Branch b, const Freq& xi) {
  const double k = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  if (k == 0.0) throw DegenerateModeError("phase_slope_derivative: xi = 0");
  const double S = std::sqrt(4.0 * k * k + 1.0);
  const double k3 = k * k * k;
  const double k5 = k3 * k * k;
  const double top = b == Branch::A ? 1.0 + S : 1.0 - S;
  const double tail = b == Branch::A ? 1.5 / k5 : -1.5 / k5;
  return xi[2] * top / (2.0 * k3 * S) -
         xi[1] * xi[1] * xi[2] * ((16.0 * k * k + 3.0) / (2.0 * k5 * S * S * S) + tail);
}

double radial_phase_slope(Branch b, double rho, double xi3) {
  const double k = std::hypot(rho, xi3);
  if (k == 0.0) throw DegenerateModeError("radial_phase_slope: xi = 0");
  const double S = std::sqrt(4.0 * k * k + 1.0);
  const double dk = b == Branch::A ? -(1.0 + S) / (2.0 * k * k * S)
                                   : (S - 1.0) / (2.0 * k * k * S);
  return xi3 * dk * rho / k;
}

PhaseBoundConstants phase_bound_constants(Branch b, double r, double R, double beta,
                                          int samples, std::uint64_t seed) {
  if (!(r > 0.0 && r < R)) throw ParameterError("phase bounds: need 0 < r < R");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0 * R, 2.0 * R);
  PhaseBoundConstants c;
  while (c.samples < samples) {
    const Freq xi{u(rng), u(rng), u(rng)};
    if (!in_band(xi, 0.5 * r, 2.0 * R)) continue;
    ++c.samples;
    const double g = std::abs(phase_slope(b, xi));
    if (g > 0.0) c.lower = std::max(c.lower, std::pow(R, -3.0 - beta) * std::abs(xi[1]) / g);
    c.upper = std::max(c.upper, g / std::pow(R, beta));
    c.derivative = std::max(c.derivative,
                            std::abs(phase_slope_derivative(b, xi)) / std::pow(R, 2.0 * beta));
  }
  return c;
}

QuadResult kernel(double theta, double tau, std::array<double, 2> z_h, double xi3,
                  double r, double R, Branch b, int sign, const KernelOptions& opt) {
  if (!(r > 0.0 && r < R)) throw ParameterError("kernel: need 0 < r < R");
  if (sign != 1 && sign != -1) throw ParameterError("kernel: sign must be +1 or -1");
  const double a = 0.5 * r;
  const double top = rho_upper(xi3, R);
  if (std::abs(xi3) <= 0.5 * r || top <= a) return {};
  const double w = max_radial_slope(b, xi3, a, top);
  const double zn = std::hypot(z_h[0], z_h[1]);
  const cplx phase_dir(0.0, -sign * theta);
  // 1e-8 of the largest possible |K|, the area of the disc |xi_h| <= 2R.
  const double floor = 1e-8 * 4.0 * kPi * R * R;

  if (opt.method == KernelMethod::radial) {
    auto f = [&](double rho) {
      const double amp = psi_radial(rho, xi3, r, R);
      if (amp == 0.0) return cplx{};
      const double k = std::hypot(rho, xi3);
      const double g = xi3 * dispersion_value(b, k);
      return 2.0 * kPi * amp * std::exp(-tau * rho * rho) * std::exp(phase_dir * g) *
             ::j0(zn * rho) * rho;
    };
    const int start = static_cast<int>(std::ceil((theta * w + zn) * (top - a) / (4.0 * kPi))) + 4;
    return refine([&](int n) { return composite_1d(f, a, top, n); }, start, opt.max_panels,
                  opt.tol, floor);
  }

  auto f = [&](double x1, double x2) {
    const double rho2 = x1 * x1 + x2 * x2;
    const double amp = psi({x1, x2, xi3}, r, R);
    if (amp == 0.0) return cplx{};
    const double k = std::sqrt(rho2 + xi3 * xi3);
    const double g = xi3 * dispersion_value(b, k);
    return amp * std::exp(-tau * rho2) *
           std::exp(phase_dir * g + cplx(0.0, z_h[0] * x1 + z_h[1] * x2));
  };
  const int start = static_cast<int>(std::ceil((theta * w + zn) * 2.0 * top / kPi)) + 4;
  return refine([&](int n) { return composite_2d(f, -top, top, n); }, start,
                std::min(opt.max_panels, 2048), opt.tol, floor);
}

double kernel_plane_area(double xi3, double r, double R) {
  const double top = rho_upper(xi3, R);
  if (std::abs(xi3) <= 0.5 * r || top <= 0.5 * r) return 0.0;
  auto f = [&](double rho) { return cplx(2.0 * kPi * psi_radial(rho, xi3, r, R) * rho); };
  return composite_1d(f, 0.5 * r, top, 64).value.real();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayFit kernel_decay_fit(Branch b, double r, double R, double beta,
                          const DecayFitOptions& opt) {
  if (opt.theta.size() < 2) throw ParameterError("kernel_decay_fit: need a theta grid");
  const double lo = *std::min_element(opt.theta.begin(), opt.theta.end());
  const double hi = *std::max_element(opt.theta.begin(), opt.theta.end());
  if (!(lo > 0.0) || hi / lo < 1e3 * (1 - 1e-12)) {
    throw ParameterError("kernel_decay_fit: theta grid must span at least 3 decades");
  }
  DecayFit fit;
  fit.window_hi = opt.window_hi > 0.0 ? opt.window_hi : hi;
  fit.window_lo = opt.window_lo > 0.0 ? opt.window_lo : hi / std::pow(10.0, 1.5);
  const auto pts = latin_hypercube(opt.samples, opt.seed);
  std::vector<double> lx, ly;
  for (double th : opt.theta) {
    const SampledSup s = sampled_sup(b, r, R, th, opt.tau, pts, opt.tol);
    fit.theta.push_back(th);
    fit.sup_abs.push_back(s.sup);
    fit.error.push_back(s.error);
    fit.accuracy_degraded = fit.accuracy_degraded || s.degraded;
    fit.bound_ratio = std::max(fit.bound_ratio, s.sup * std::sqrt(th) *
                                                    std::exp(0.5 * r * r * opt.tau) /
                                                    std::pow(R, 4.0 + 3.0 * beta));
    if (th >= fit.window_lo * (1 - 1e-12) && th <= fit.window_hi * (1 + 1e-12) && s.sup > 0) {
      lx.push_back(std::log(th));
      ly.push_back(std::log(s.sup));
    }
  }
  fit.slope = lx.size() >= 2 ? fit_slope(lx, ly) : std::nan("");
  return fit;
}

TauFit kernel_tau_fit(Branch b, double r, double R, double theta,
                      const std::vector<double>& tau, int samples, std::uint64_t seed,
                      double tol) {
  if (tau.size() < 2) throw ParameterError("kernel_tau_fit: need >= 2 tau values");
  const auto pts = latin_hypercube(samples, seed);
  TauFit fit;
  fit.expected = -0.5 * r * r;
  std::vector<double> ly;
  for (double t : tau) {
    const SampledSup s = sampled_sup(b, r, R, theta, t, pts, tol);
    fit.tau.push_back(t);
    fit.sup_abs.push_back(s.sup);
    fit.accuracy_degraded = fit.accuracy_degraded || s.degraded;
    ly.push_back(std::log(s.sup));
  }
  fit.slope = fit_slope(fit.tau, ly);
  return fit;
}

double StrichartzProfile::value(double rho, double xi3) const {
  return bump((rho - rho0) / rho_width) * bump((xi3 - xi3_0) / xi3_width);
}

double StrichartzProfile::l2_norm() const {
  auto g = [&](double rho) {
    const double v = bump((rho - rho0) / rho_width);
    return cplx(v * v * rho);
  };
  auto q = [&](double x) {
    const double v = bump((x - xi3_0) / xi3_width);
    return cplx(v * v);
  };
  const double radial = composite_1d(g, rho0 - rho_width, rho0 + rho_width, 64).value.real();
  const double vertical =
      composite_1d(q, xi3_0 - xi3_width, xi3_0 + xi3_width, 64).value.real();
  return std::sqrt(2.0 * kPi * radial * vertical / std::pow(2.0 * kPi, 3));
}

namespace {

// sup over |x_h| of ||Psi(D) G(t) f (x_h, .)||_{L^2_v}.
double linf_l2(const StrichartzProfile& f, double theta, double tau,
               const StrichartzOptions& opt, double panel_factor) {
  const auto& q = rule12();
  const double rho_lo = std::max(0.5 * opt.r, f.rho0 - f.rho_width);
  const double x3_lo = f.xi3_0 - f.xi3_width;
  const double x3_hi = f.xi3_0 + f.xi3_width;
  const int x3_panels = std::max(1, opt.xi3_nodes / 12);
  const double hx3 = (x3_hi - x3_lo) / x3_panels;

  double w = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double xi3 = x3_lo + (x3_hi - x3_lo) * k / 16.0;
    w = std::max(w, max_radial_slope(opt.branch, xi3, rho_lo, f.rho0 + f.rho_width));
  }
  const double x_max = 1.1 * theta * w + 20.0 / f.rho_width;

  // Per vertical node: quadrature nodes rho_j and weights a_j (phase included).
  struct Column {
    double weight;
    std::vector<double> rho;
    std::vector<cplx> a;
  };
  std::vector<Column> cols;
  const cplx phase_dir(0.0, -opt.sign * theta);
  for (int p = 0; p < x3_panels; ++p) {
    for (int i = 0; i < 12; ++i) {
      const double xi3 = x3_lo + (p + 0.5) * hx3 + 0.5 * hx3 * q.x[i];
      Column c;
      c.weight = 0.5 * hx3 * q.w[i];
      const double hi = std::min(f.rho0 + f.rho_width, rho_upper(xi3, opt.R));
      if (hi > rho_lo) {
        const int panels = static_cast<int>(
            std::ceil(panel_factor * ((theta * w + x_max) * (hi - rho_lo) / kPi + 4.0)));
        const auto& g20 = rule20();
        const double h = (hi - rho_lo) / panels;
        c.rho.reserve(20 * panels);
        c.a.reserve(20 * panels);
        for (int k = 0; k < panels; ++k) {
          const double mid = rho_lo + (k + 0.5) * h;
          for (int j = 0; j < 20; ++j) {
            const double rho = mid + 0.5 * h * g20.x[j];
            const double amp = psi_radial(rho, xi3, opt.r, opt.R) * f.value(rho, xi3);
            if (amp == 0.0) continue;
            const double gam = xi3 * dispersion_value(opt.branch, std::hypot(rho, xi3));
            c.rho.push_back(rho);
            c.a.push_back(amp * std::exp(-tau * rho * rho) * std::exp(phase_dir * gam) * rho *
                          (0.5 * h * g20.w[j]) / (2.0 * kPi));
          }
        }
      }
      cols.push_back(std::move(c));
    }
  }

  auto vertical_l2_sq = [&](double x) {
    double acc = 0.0;
    for (const auto& c : cols) {
      cplx h{};
      for (std::size_t j = 0; j < c.rho.size(); ++j) h += c.a[j] * ::j0(x * c.rho[j]);
      acc += c.weight * std::norm(h);
    }
    return acc / (2.0 * kPi);
  };

  const int n = std::max(4, opt.x_samples);
  std::vector<double> xs(n), vals(n);
  for (int i = 0; i < n; ++i) xs[i] = x_max * i / (n - 1);
  parallel_for(n, [&](std::size_t i) { vals[i] = vertical_l2_sq(xs[i]); });
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  double sup = vals[best];
  // Golden-section refinement inside the neighbouring cells.
  double a = xs[std::max(0, best - 1)], b = xs[std::min(n - 1, best + 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = vertical_l2_sq(c), fd = vertical_l2_sq(d);
  for (int it = 0; it < 14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = vertical_l2_sq(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = vertical_l2_sq(d);
    }
  }
  sup = std::max({sup, fc, fd});
  return std::sqrt(sup);
}

}  // namespace

double StrichartzResult::lp_norm(double p) const {
  if (std::isinf(p)) {
    double m = value_t0;
    for (double v : value) m = std::max(m, v);
    return m;
  }
  if (t.empty()) return 0.0;
  double acc = 0.5 * (std::pow(value_t0, p) + std::pow(value[0], p)) * t[0];
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    acc += 0.5 * (std::pow(value[i], p) * t[i] + std::pow(value[i + 1], p) * t[i + 1]) *
           std::log(t[i + 1] / t[i]);
  }
  return std::pow(acc, 1.0 / p);
}

StrichartzResult semigroup_strichartz_norm(const StrichartzProfile& f, double eps,
                                           const StrichartzOptions& opt) {
  if (!(eps > 0.0)) throw ParameterError("strichartz: eps must be > 0");
  if (!(opt.r > 0.0 && opt.r < opt.R)) throw ParameterError("strichartz: need 0 < r < R");
  if (!(f.rho_width > 0.0 && f.xi3_width > 0.0 && f.rho0 > f.rho_width &&
        f.xi3_0 > f.xi3_width)) {
    throw ParameterError("strichartz: profile must have rho0 > rho_width > 0 and "
                         "xi3_0 > xi3_width > 0");
  }
  StrichartzResult res;
  res.f_l2 = f.l2_norm();
  const double rho_min = std::max(0.5 * opt.r, f.rho0 - f.rho_width);
  const double damp = std::pow(eps, opt.alpha);
  res.value_t0 = linf_l2(f, 0.0, 0.0, opt, opt.panel_factor) / res.f_l2;

  const double t_lo = 1e-2 * eps, t_hi = 10.0 / eps;
  const int n = static_cast<int>(std::ceil(std::log10(t_hi / t_lo) * opt.t_per_decade)) + 1;
  for (int i = 0; i < n; ++i) res.t.push_back(t_lo * std::pow(t_hi / t_lo, double(i) / (n - 1)));
  res.value.assign(n, 0.0);
  int last = -1;
  for (int i = 0; i < n; ++i) {
    const double tau = res.t[i] * damp;
    if (tau * rho_min * rho_min > opt.damping_cut) break;
    res.value[i] = linf_l2(f, res.t[i] / eps, tau, opt, opt.panel_factor) / res.f_l2;
    last = i;
  }
  if (last >= 0) {
    const double fine =
        linf_l2(f, res.t[last] / eps, res.t[last] * damp, opt, 2.0 * opt.panel_factor) / res.f_l2;
    res.error_estimate = std::abs(fine - res.value[last]) / std::max(fine, 1e-300);
    res.accuracy_degraded = res.error_estimate > 1e-3;
  }
  return res;
}

ScalingSweep strichartz_scaling_sweep(const StrichartzProfile& f,
                                      const std::vector<double>& eps,
                                      const std::vector<double>& p,
                                      const StrichartzOptions& opt) {
  if (eps.size() < 2) throw ParameterError("strichartz sweep: need >= 2 eps values");
  const auto [emin, emax] = std::minmax_element(eps.begin(), eps.end());
  if (*emax / *emin < 100.0 * (1 - 1e-12)) {
    throw ParameterError("strichartz sweep: eps list must span at least 2 decades");
  }
  if (!(opt.alpha < 1.0 / 3.0)) throw ParameterError("strichartz sweep: alpha < 1/3 required");
  ScalingSweep sw;
  sw.eps = eps;
  sw.p = p;
  sw.norms.assign(p.size(), std::vector<double>(eps.size(), 0.0));
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const StrichartzResult r = semigroup_strichartz_norm(f, eps[e], opt);
    sw.accuracy_degraded = sw.accuracy_degraded || r.accuracy_degraded;
    for (std::size_t k = 0; k < p.size(); ++k) sw.norms[k][e] = r.lp_norm(p[k]);
    sw.runs.push_back(r);
  }
  std::vector<double> lx;
  for (double e : eps) lx.push_back(std::log(e));
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::vector<double> ly;
    for (double v : sw.norms[k]) ly.push_back(std::log(v));
    sw.slope.push_back(fit_slope(lx, ly));
    sw.predicted.push_back(std::isinf(p[k]) ? 0.0 : (1.0 - 3.0 * opt.alpha) / (4.0 * p[k]));
  }
  return sw;
}

}  // namespace rotmhd
