#include "rotmhd/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"
#include "rotmhd/smooth.hpp"

namespace rotmhd {
namespace {

constexpr double kLow = 0.75;
constexpr double kHigh = 4.0 / 3.0;

// Apply m(|xi_h|) or m(|xi_3|) mode-wise.
template <class M>
SpectralField apply_multiplier(const SpectralField& u, Direction d, M&& m) {
  const Grid& g = u.grid;
  SpectralField out(g);
  std::vector<double> wv(g.n_v());
  for (int i3 = 0; i3 < g.n_v(); ++i3) wv[i3] = m(std::abs(g.xi_v(i3)));
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double wh = d == Direction::horizontal ? m(std::hypot(g.xi_h(i1), g.xi_h(i2))) : 1.0;
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        const double w = d == Direction::horizontal ? wh : wv[i3];
        if (w == 0.0) continue;
        for (int c = 0; c < 3; ++c) out.comp[c][idx] = w * u.comp[c][idx];
      }
    }
  }
  return out;
}

double max_frequency(const Grid& g, Direction d) {
  if (d == Direction::vertical) return std::abs(g.xi_v(g.n_v() / 2));
  const double k = std::abs(g.xi_h(g.n_h() / 2));
  return std::sqrt(2.0) * k;
}

std::vector<double> physical_scalar(const std::vector<cplx>& hat, const Grid& g) {
  return inverse_scalar(g, hat);
}

double mixed_norm(const std::vector<double>& f, const Grid& g, double q_h, double q_v) {
  PhysicalField p(g);
  p.comp[0] = f;
  return aniso_lebesgue_norm(p, q_h, q_v);
}

}  // namespace

double lp_low(double z) {
  return 1.0 - smooth_step((std::abs(z) - kLow) / (kHigh - kLow));
}

double lp_ring(double z) { return lp_low(0.5 * z) - lp_low(z); }

double block_multiplier(double z, int q) {
  if (q < -1) return 0.0;
  if (q == -1) return lp_low(z);
  return lp_ring(std::ldexp(z, -q));
}

double low_pass_multiplier(double z, int q) {
  if (q <= -1) return 0.0;
  return lp_low(std::ldexp(z, -q));
}

int max_block(const Grid& g, Direction d) {
  const double kmax = max_frequency(g, d);
  int q = -1;
  while (std::ldexp(kLow, q + 1) < kmax) ++q;
  return q;
}

SpectralField dyadic_block(const SpectralField& u, int q, Direction d) {
  return apply_multiplier(u, d, [q](double z) { return block_multiplier(z, q); });
}

SpectralField low_pass(const SpectralField& u, int q, Direction d) {
  return apply_multiplier(u, d, [q](double z) { return low_pass_multiplier(z, q); });
}

std::vector<double> vertical_block_energies(const SpectralField& u) {
  const Grid& g = u.grid;
  std::vector<double> column(g.n_v(), 0.0);
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2)
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx)
        column[i3] += std::norm(u.comp[0][idx]) + std::norm(u.comp[1][idx]) +
                      std::norm(u.comp[2][idx]);
  const int qmax = max_block(g, Direction::vertical);
  std::vector<double> out(qmax + 2, 0.0);
  for (int q = -1; q <= qmax; ++q) {
    double s = 0.0;
    for (int i3 = 0; i3 < g.n_v(); ++i3) {
      const double m = block_multiplier(std::abs(g.xi_v(i3)), q);
      s += m * m * column[i3];
    }
    out[q + 1] = s * g.parseval_weight();
  }
  return out;
}

SpectralField DyadicLadder::reconstruct() const {
  if (blocks.empty()) throw ConfigError("DyadicLadder: blocks were not kept");
  SpectralField out(blocks.begin()->second.grid);
  for (const auto& [key, f] : blocks) out += f;
  return out;
}

DyadicLadder build_ladder(const SpectralField& u, bool keep_blocks) {
  DyadicLadder L;
  L.j_max = max_block(u.grid, Direction::horizontal);
  L.q_max = max_block(u.grid, Direction::vertical);
  for (int j = -1; j <= L.j_max; ++j) {
    const SpectralField hj = dyadic_block(u, j, Direction::horizontal);
    for (int q = -1; q <= L.q_max; ++q) {
      SpectralField b = dyadic_block(hj, q, Direction::vertical);
      L.block_norms[{j, q}] = l2_norm(b);
      if (keep_blocks) L.blocks.emplace(std::make_pair(j, q), std::move(b));
    }
  }
  return L;
}

double dyadic_sobolev_norm(const SpectralField& u, double sigma_h, double sigma_v) {
  const Grid& g = u.grid;
  const int jmax = max_block(g, Direction::horizontal);
  const int qmax = max_block(g, Direction::vertical);
  // Per-mode weight sum_{j,q} 2^{2(j s1 + q s2)} m_j(|xi_h|)^2 m_q(|xi_3|)^2
  // factorises into a horizontal and a vertical sum.
  auto weight = [](double z, int top, double sigma) {
    double w = 0.0;
    for (int q = -1; q <= top; ++q) {
      const double m = block_multiplier(z, q);
      if (m != 0.0) w += std::exp2(2.0 * q * sigma) * m * m;
    }
    return w;
  };
  std::vector<double> wv(g.n_v());
  for (int i3 = 0; i3 < g.n_v(); ++i3) wv[i3] = weight(std::abs(g.xi_v(i3)), qmax, sigma_v);
  double s = 0.0;
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double wh = weight(std::hypot(g.xi_h(i1), g.xi_h(i2)), jmax, sigma_h);
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        const double m = std::norm(u.comp[0][idx]) + std::norm(u.comp[1][idx]) +
                         std::norm(u.comp[2][idx]);
        s += wh * wv[i3] * m;
      }
    }
  return std::sqrt(s * g.parseval_weight());
}

double iso_sobolev_norm(const SpectralField& u, double sigma) {
  const Grid& g = u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [x1, x2, x3] = g.frequency(i);
    const double m = std::norm(u.comp[0][i]) + std::norm(u.comp[1][i]) +
                     std::norm(u.comp[2][i]);
    if (m != 0.0) s += std::pow(1.0 + x1 * x1 + x2 * x2 + x3 * x3, sigma) * m;
  }
  return std::sqrt(s * g.parseval_weight());
}

BonyParts bony_decompose(const SpectralField& a, int i, const SpectralField& b, int j) {
  require_same_grid(a.grid, b.grid, "bony_decompose");
  const Grid& g = a.grid;
  const int qmax = max_block(g, Direction::vertical);
  const std::size_t n = g.size();
  const int nb = qmax + 2;
  std::vector<std::vector<double>> da(nb), db(nb);
  for (int q = -1; q <= qmax; ++q) {
    SpectralField ab = dyadic_block(a, q, Direction::vertical);
    SpectralField bb = dyadic_block(b, q, Direction::vertical);
    da[q + 1].resize(n);
    db[q + 1].resize(n);
    inverse_real_pair(g, ab.comp[i], bb.comp[j], da[q + 1], db[q + 1]);
  }
  std::vector<double> tab(n, 0.0), tba(n, 0.0), rem(n, 0.0), sa(n, 0.0), sb(n, 0.0);
  for (int q = -1; q <= qmax; ++q) {
    const int k = q + 1;
    // sa, sb hold S_{q-1} = sum_{q' <= q-2} Delta_{q'}.
    for (std::size_t p = 0; p < n; ++p) {
      tab[p] += sa[p] * db[k][p];
      tba[p] += sb[p] * da[k][p];
      double near = db[k][p];
      if (k > 0) near += db[k - 1][p];
      if (k + 1 < nb) near += db[k + 1][p];
      rem[p] += da[k][p] * near;
    }
    if (k >= 1) {
      for (std::size_t p = 0; p < n; ++p) {
        sa[p] += da[k - 1][p];
        sb[p] += db[k - 1][p];
      }
    }
  }
  BonyParts out;
  out.t_ab = forward_scalar(g, tab);
  out.t_ba = forward_scalar(g, tba);
  out.remainder = forward_scalar(g, rem);
  out.product = product(a, i, b, j);
  for (auto* v : {&out.t_ab, &out.t_ba, &out.remainder}) {
    for (std::size_t p = 0; p < n; ++p)
      if (!g.retained(p)) (*v)[p] = 0.0;
  }
  return out;
}

BernsteinReport check_bernstein(const SpectralField& u, int k, double p, double q,
                                BernsteinMode mode, double lambda) {
  if (k < 0) throw ParameterError("check_bernstein: k must be >= 0");
  if (!(p <= q)) throw ParameterError("check_bernstein: need p <= q");
  if (!(lambda > 0.0)) throw ParameterError("check_bernstein: lambda must be > 0");
  const Grid& g = u.grid;
  const int axis = mode == BernsteinMode::vertical ? 2 : 0;
  SpectralField du = u;
  for (int n = 0; n < k; ++n) du = derivative(du, axis);
  const auto f = physical_scalar(du.comp[0], g);
  const auto f0 = physical_scalar(u.comp[0], g);
  double dim = 3.0, lhs = 0.0, base = 0.0;
  switch (mode) {
    case BernsteinMode::isotropic:
      lhs = mixed_norm(f, g, q, q);
      base = mixed_norm(f0, g, p, p);
      break;
    case BernsteinMode::horizontal:
      dim = 2.0;
      lhs = mixed_norm(f, g, q, 2.0);
      base = mixed_norm(f0, g, p, 2.0);
      break;
    case BernsteinMode::vertical:
      dim = 1.0;
      lhs = mixed_norm(f, g, 2.0, q);
      base = mixed_norm(f0, g, 2.0, p);
      break;
  }
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  BernsteinReport r;
  r.lhs = lhs;
  r.rhs_band = std::pow(lambda, k + dim * (inv_p - inv_q)) * base;
  r.ratio = r.rhs_band > 0.0 ? r.lhs / r.rhs_band : 0.0;
  return r;
}

ProductReport check_product_law(const SpectralField& u, const SpectralField& v,
                                ProductLaw law, const ProductExponents& e) {
  auto fail = [](const std::string& what) {
    throw ParameterError("check_product_law: hypothesis violated: " + what);
  };
  SpectralField su(u.grid), sv(v.grid), uv(u.grid);
  su.comp[0] = u.comp[0];
  sv.comp[0] = v.comp[0];
  uv.comp[0] = product(u, 0, v, 0);
  ProductReport r;
  switch (law) {
    case ProductLaw::isotropic: {
      const double half_d = 1.5;
      if (!(e.s < half_d)) fail("s < d/2");
      if (!(e.t < half_d)) fail("t < d/2");
      if (!(e.s + e.t > 0.0)) fail("s + t > 0");
      r.lhs_norm = iso_sobolev_norm(uv, e.s + e.t - half_d);
      r.rhs_product = iso_sobolev_norm(su, e.s) * iso_sobolev_norm(sv, e.t);
      break;
    }
    case ProductLaw::anisotropic: {
      if (!(e.s < 1.0)) fail("s < 1");
      if (!(e.t < 1.0)) fail("t < 1");
      if (!(e.s + e.t > 0.0)) fail("s + t > 0");
      if (!(e.s_v < 0.5)) fail("s' < 1/2");
      if (!(e.t_v < 0.5)) fail("t' < 1/2");
      if (!(e.s_v + e.t_v > 0.0)) fail("s' + t' > 0");
      r.lhs_norm = aniso_sobolev_norm(uv, e.s + e.t - 1.0, e.s_v + e.t_v - 0.5);
      r.rhs_product = aniso_sobolev_norm(su, e.s, e.s_v) * aniso_sobolev_norm(sv, e.t, e.t_v);
      break;
    }
    case ProductLaw::vertical: {
      if (!(e.s < 1.0)) fail("sigma < 1");
      if (!(e.t < 1.0)) fail("sigma' < 1");
      if (!(e.s + e.t > 0.0)) fail("sigma + sigma' > 0");
      if (!(e.s_v > 0.5)) fail("s0 > 1/2");
      if (!(e.t_v <= e.s_v)) fail("s1 <= s0");
      if (!(e.s_v + e.t_v > 0.0)) fail("s0 + s1 > 0");
      r.lhs_norm = aniso_sobolev_norm(uv, e.s + e.t - 1.0, e.t_v);
      r.rhs_product = aniso_sobolev_norm(su, e.s, e.s_v) * aniso_sobolev_norm(sv, e.t, e.t_v);
      break;
    }
  }
  r.empirical_C = r.rhs_product > 0.0 ? r.lhs_norm / r.rhs_product : 0.0;
  return r;
}

EnergyReport check_energy_lemma(const SpectralField& u, const SpectralField& v,
                                const SpectralField& w, EnergyLemma lemma,
                                double s0, double s1, int q_max) {
  auto fail = [](const std::string& what) {
    throw ParameterError("check_energy_lemma: hypothesis violated: " + what);
  };
  if (!(s0 > 0.5)) fail("s0 > 1/2");
  if (lemma == EnergyLemma::advection_regular || lemma == EnergyLemma::symmetric_regular) {
    if (!(s1 >= s0)) fail("s1 >= s0");
  } else {
    if (!(s1 < s0)) fail("s1 < s0");
    if (!(s0 + s1 > 0.0)) fail("s0 + s1 > 0");
  }
  for (const SpectralField* f : {&u, &v, &w}) require_divergence_free(*f, "check_energy_lemma");

  const bool symmetric = lemma == EnergyLemma::symmetric_regular || lemma == EnergyLemma::symmetric_rough;
  const SpectralField uv = advection(u, v);
  const SpectralField uw = advection(u, w);

  auto n0 = [](const SpectralField& f, double s) { return h0s_norm(f, s); };
  auto n1 = [](const SpectralField& f, double s) {
    return aniso_sobolev(f, {1.0, s, true, false}).value;
  };
  const double U = n0(u, s0), dU = n1(u, s0);
  const double V = n0(v, s1), dV = n1(v, s1);
  const double W = n0(w, s1), dW = n1(w, s1);
  double product = 0.0;
  switch (lemma) {
    case EnergyLemma::advection_regular:
      product = dU * V * dV + std::sqrt(U * dU * V) * std::pow(dV, 1.5);
      break;
    case EnergyLemma::symmetric_regular:
      product = std::sqrt(dU * dV * dW) *
                (std::sqrt(U * V * dW) + std::sqrt(U * dV * W) + std::sqrt(dU * V * W));
      break;
    case EnergyLemma::advection_rough:
      product = (U + dU) * V * dV;
      break;
    case EnergyLemma::symmetric_rough:
      product = (U + dU) * std::sqrt(V * dV * W * dW);
      break;
  }

  EnergyReport r;
  for (int q = -1; q <= q_max; ++q) {
    const SpectralField bv = dyadic_block(v, q, Direction::vertical);
    double lhs;
    if (symmetric) {
      const SpectralField bw = dyadic_block(w, q, Direction::vertical);
      lhs = inner_product(dyadic_block(uv, q, Direction::vertical), bw) +
            inner_product(dyadic_block(uw, q, Direction::vertical), bv);
    } else {
      lhs = inner_product(dyadic_block(uv, q, Direction::vertical), bv);
    }
    const double rhs = std::exp2(-2.0 * q * s1) * product;
    r.q.push_back(q);
    r.lhs.push_back(std::abs(lhs));
    r.rhs.push_back(rhs);
    r.ratio.push_back(rhs > 0.0 ? std::abs(lhs) / rhs : 0.0);
    r.ratio_sum += r.ratio.back();
  }
  r.advection_bracket = inner_product(uv, v);
  r.symmetric_bracket = inner_product(uv, w) + inner_product(uw, v);
  double grad_v = 0.0, grad_w = 0.0;
  for (int a = 0; a < 3; ++a) {
    grad_v += std::pow(l2_norm(derivative(v, a)), 2);
    grad_w += std::pow(l2_norm(derivative(w, a)), 2);
  }
  const double u_inf = aniso_lebesgue_norm(u, INFINITY, INFINITY);
  r.scale = u_inf * (std::sqrt(grad_v) * std::max(l2_norm(v), l2_norm(w)) +
                     std::sqrt(grad_w) * l2_norm(v));
  return r;
}

}  // namespace rotmhd
