#include "rotmhd/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"

namespace rotmhd {
namespace {

constexpr cplx I(0.0, 1.0);

template <class F>
void for_each_mode(const Grid& g, F&& f) {
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    const double x1 = g.op_xi_h(i1);
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double x2 = g.op_xi_h(i2);
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        f(idx, x1, x2, g.op_xi_v(i3));
      }
    }
  }
}

// Symmetric stress S_ij = u_i u_j - b_i b_j (ordered 11,12,13,22,23,33) and
// antisymmetric M_ij = u_j b_i - b_j u_i (ordered 12,13,23), transformed and
// dealiased.
struct Products {
  std::array<std::vector<cplx>, 6> stress;
  std::array<std::vector<cplx>, 3> induction;
};

constexpr std::array<std::array<int, 2>, 6> kSym = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
constexpr std::array<std::array<int, 2>, 3> kAnti = {{{0, 1}, {0, 2}, {1, 2}}};

void truncate(const Grid& g, std::vector<cplx>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!g.retained(i)) v[i] = 0.0;
  }
}

Products compute_products(const StateVector& U) {
  const Grid& g = U.grid();
  const PhysicalField u = inverse_transform(U.u);
  const PhysicalField b = inverse_transform(U.b);
  const std::size_t n = g.size();

  std::array<std::vector<double>, 9> phys;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kSym[k];
    auto& out = phys[k];
    out.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      out[p] = u.comp[i][p] * u.comp[j][p] - b.comp[i][p] * b.comp[j][p];
    }
  }
  for (int k = 0; k < 3; ++k) {
    const auto [i, j] = kAnti[k];
    auto& out = phys[6 + k];
    out.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      out[p] = u.comp[j][p] * b.comp[i][p] - b.comp[j][p] * u.comp[i][p];
    }
  }

  std::array<std::vector<cplx>, 9> spec;
  for (auto& s : spec) s.resize(n);
  for (int k = 0; k < 8; k += 2) {
    forward_real_pair(g, phys[k], phys[k + 1], spec[k], spec[k + 1]);
  }
  spec[8] = forward_scalar(g, phys[8]);
  for (auto& s : spec) truncate(g, s);

  Products out;
  for (int k = 0; k < 6; ++k) out.stress[k] = std::move(spec[k]);
  for (int k = 0; k < 3; ++k) out.induction[k] = std::move(spec[6 + k]);
  return out;
}

}  // namespace

SpectralField derivative(const SpectralField& v, int axis) {
  if (axis < 0 || axis > 2) throw ConfigError("derivative: axis must be 0, 1 or 2");
  SpectralField out(v.grid);
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double x3) {
    const double xi = axis == 0 ? x1 : (axis == 1 ? x2 : x3);
    for (int c = 0; c < 3; ++c) out.comp[c][i] = I * xi * v.comp[c][i];
  });
  return out;
}

std::vector<cplx> divergence(const SpectralField& v) {
  std::vector<cplx> out(v.size());
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double x3) {
    out[i] = I * (x1 * v.comp[0][i] + x2 * v.comp[1][i] + x3 * v.comp[2][i]);
  });
  return out;
}

SpectralField gradient(const SpectralField& scalar) {
  SpectralField out(scalar.grid);
  for_each_mode(scalar.grid, [&](std::size_t i, double x1, double x2, double x3) {
    const cplx p = scalar.comp[0][i];
    out.comp[0][i] = I * x1 * p;
    out.comp[1][i] = I * x2 * p;
    out.comp[2][i] = I * x3 * p;
  });
  return out;
}

SpectralField gradient_part(const SpectralField& v) {
  SpectralField out(v.grid);
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double x3) {
    const double k2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (k2 == 0.0) return;
    const cplx d = (x1 * v.comp[0][i] + x2 * v.comp[1][i] + x3 * v.comp[2][i]) / k2;
    out.comp[0][i] = x1 * d;
    out.comp[1][i] = x2 * d;
    out.comp[2][i] = x3 * d;
  });
  return out;
}

SpectralField project_leray(const SpectralField& v) {
  SpectralField out = v;
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double x3) {
    const double k2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (k2 == 0.0) return;
    const cplx d = (x1 * v.comp[0][i] + x2 * v.comp[1][i] + x3 * v.comp[2][i]) / k2;
    out.comp[0][i] -= x1 * d;
    out.comp[1][i] -= x2 * d;
    out.comp[2][i] -= x3 * d;
  });
  return out;
}

StateVector project_leray(const StateVector& U) {
  return StateVector(project_leray(U.u), project_leray(U.b));
}

double divergence_defect(const SpectralField& v) {
  double scale = 0.0;
  for (const auto& c : v.comp)
    for (const auto& z : c) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double x3) {
    const double k = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
    if (k == 0.0) return;
    const cplx d = x1 * v.comp[0][i] + x2 * v.comp[1][i] + x3 * v.comp[2][i];
    worst = std::max(worst, std::abs(d) / k);
  });
  return worst / scale;
}

void require_divergence_free(const SpectralField& v, const char* where, double tol) {
  const double d = divergence_defect(v);
  if (!(d <= tol)) {
    throw InvariantError(std::string(where) + ": field is not divergence-free (defect " +
                         std::to_string(d) + ")");
  }
}

void dealias(SpectralField& v) {
  for (auto& c : v.comp) truncate(v.grid, c);
}

void dealias(StateVector& U) {
  dealias(U.u);
  dealias(U.b);
}

bool is_dealiased(const SpectralField& v) {
  for (const auto& c : v.comp) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!v.grid.retained(i) && c[i] != cplx{}) return false;
    }
  }
  return true;
}

double inner_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& x = a.comp[c];
    const auto& y = b.comp[c];
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    }
  }
  return s * a.grid.parseval_weight();
}

double inner_product(const StateVector& a, const StateVector& b) {
  return inner_product(a.u, b.u) + inner_product(a.b, b.b);
}

double l2_norm(const SpectralField& v) { return std::sqrt(inner_product(v, v)); }
double l2_norm(const StateVector& U) { return std::sqrt(inner_product(U, U)); }

double horizontal_gradient_sq(const SpectralField& v) {
  double s = 0.0;
  for_each_mode(v.grid, [&](std::size_t i, double x1, double x2, double) {
    const double w = x1 * x1 + x2 * x2;
    if (w == 0.0) return;
    s += w * (std::norm(v.comp[0][i]) + std::norm(v.comp[1][i]) +
              std::norm(v.comp[2][i]));
  });
  return s * v.grid.parseval_weight();
}

double horizontal_gradient_sq(const StateVector& U) {
  return horizontal_gradient_sq(U.u) + horizontal_gradient_sq(U.b);
}

std::vector<cplx> product(const SpectralField& a, int i, const SpectralField& b,
                          int j) {
  require_same_grid(a.grid, b.grid, "product");
  const Grid& g = a.grid;
  std::vector<double> x(g.size()), y(g.size());
  inverse_real_pair(g, a.comp[i], b.comp[j], x, y);
  for (std::size_t p = 0; p < x.size(); ++p) x[p] *= y[p];
  auto out = forward_scalar(g, x);
  truncate(g, out);
  return out;
}

SpectralField advection(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "advection");
  const Grid& g = a.grid;
  const PhysicalField ap = inverse_transform(a);
  PhysicalField acc(g);
  for (int j = 0; j < 3; ++j) {
    const PhysicalField db = inverse_transform(derivative(b, j));
    for (int c = 0; c < 3; ++c) {
      auto& o = acc.comp[c];
      for (std::size_t p = 0; p < o.size(); ++p) o[p] += ap.comp[j][p] * db.comp[c][p];
    }
  }
  SpectralField out = forward_transform(acc);
  dealias(out);
  return out;
}

StateVector quadratic_terms(const StateVector& U) {
  const Grid& g = U.grid();
  const Products P = compute_products(U);
  const auto& S = P.stress;
  const auto& M = P.induction;
  StateVector out(g);
  for_each_mode(g, [&](std::size_t i, double x1, double x2, double x3) {
    out.u.comp[0][i] = I * (x1 * S[0][i] + x2 * S[1][i] + x3 * S[2][i]);
    out.u.comp[1][i] = I * (x1 * S[1][i] + x2 * S[3][i] + x3 * S[4][i]);
    out.u.comp[2][i] = I * (x1 * S[2][i] + x2 * S[4][i] + x3 * S[5][i]);
    out.b.comp[0][i] = I * (x2 * M[0][i] + x3 * M[1][i]);
    out.b.comp[1][i] = I * (-x1 * M[0][i] + x3 * M[2][i]);
    out.b.comp[2][i] = I * (-x1 * M[1][i] - x2 * M[2][i]);
  });
  return out;
}

SpectralField rotate_e3(const SpectralField& v) {
  SpectralField out(v.grid);
  out.comp[0] = v.comp[1];
  for (auto& z : out.comp[0]) z = -z;
  out.comp[1] = v.comp[0];
  return out;
}

SpectralField pressure_from_state(const StateVector& U, double eps) {
  require_divergence_free(U.u, "pressure_from_state");
  require_divergence_free(U.b, "pressure_from_state");
  const Grid& g = U.grid();
  const Products P = compute_products(U);
  const auto& S = P.stress;
  const double inv_eps = std::isinf(eps) ? 0.0 : 1.0 / eps;
  SpectralField p(g);
  for_each_mode(g, [&](std::size_t i, double x1, double x2, double x3) {
    const double k2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (k2 == 0.0) return;
    const cplx xsx = x1 * x1 * S[0][i] + x2 * x2 * S[3][i] + x3 * x3 * S[5][i] +
                     2.0 * (x1 * x2 * S[1][i] + x1 * x3 * S[2][i] + x2 * x3 * S[4][i]);
    const cplx rot = I * inv_eps * (x2 * U.u.comp[0][i] - x1 * U.u.comp[1][i]);
    p.comp[0][i] = (-xsx + rot) / k2;
  });
  return p;
}

}  // namespace rotmhd
