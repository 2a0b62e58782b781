#include "rotmhd/linear.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"

namespace rotmhd {
namespace {

constexpr cplx I(0.0, 1.0);

double horizontal_sq(const Freq& xi) { return xi[0] * xi[0] + xi[1] * xi[1]; }
double total_sq(const Freq& xi) { return horizontal_sq(xi) + xi[2] * xi[2]; }

void require_nonzero(const Freq& xi, const char* where) {
  if (total_sq(xi) == 0.0) {
    throw DegenerateModeError(std::string(where) +
                              ": xi = 0 (mode 0 is the identity, handle it separately)");
  }
}

void require_rotating(const ModelParams& p, const char* where) {
  if (p.kind != SystemKind::rotating) {
    throw ParameterError(std::string(where) +
                         ": closed forms need the rotating system (nu = nu' = eps^alpha, "
                         "mu = 1/eps); use the matrix exponential instead");
  }
}

void require_nondegenerate(const Freq& xi, const char* where) {
  if (is_degenerate(xi)) {
    throw DegenerateModeError(std::string(where) +
                              ": det(D) = 0 at this frequency (xi_3 = 0); use expm");
  }
}

double one_norm(const Mat6& M) {
  double best = 0.0;
  for (int j = 0; j < 6; ++j) best = std::max(best, M.col(j).cwiseAbs().sum());
  return best;
}

}  // namespace

ModelParams ModelParams::rotating(double eps, double alpha, double s, double eta,
                                  double beta) {
  ModelParams p;
  p.kind = SystemKind::rotating;
  p.eps = eps;
  p.alpha = alpha;
  p.nu = std::pow(eps, alpha);
  p.nu_m = p.nu;
  p.mu = 1.0 / eps;
  p.s = s;
  p.eta = eta;
  p.beta = beta;
  return p;
}

ModelParams ModelParams::generic(double eps, double nu, double nu_m, double mu,
                                 double s, double eta, double beta) {
  ModelParams p;
  p.kind = SystemKind::generic;
  p.eps = eps;
  p.alpha = 0.0;
  p.nu = nu;
  p.nu_m = nu_m;
  p.mu = mu;
  p.s = s;
  p.eta = eta;
  p.beta = beta;
  return p;
}

void ModelParams::validate() const {
  if (!(eps > 0.0)) throw ParameterError("model: eps must be > 0");
  if (!(alpha >= 0.0)) throw ParameterError("model: alpha must be >= 0");
  if (!(beta >= 1.0)) throw ParameterError("model: beta must be >= 1");
  if (!(s > 0.5)) throw ParameterError("model: s must be > 1/2");
  if (!(eta > 0.0)) throw ParameterError("model: eta must be > 0");
  if (!(nu >= 0.0) || !(nu_m >= 0.0)) {
    throw ParameterError("model: viscosities must be >= 0");
  }
  if (!std::isfinite(mu)) throw ParameterError("model: mu must be finite");
  if (kind == SystemKind::rotating) {
    if (!std::isfinite(eps)) throw ParameterError("model: rotating system needs finite eps");
    if (nu != std::pow(eps, alpha) || nu_m != nu) {
      throw ParameterError("model: rotating system requires nu = nu' = eps^alpha");
    }
    if (mu != 1.0 / eps) throw ParameterError("model: rotating system requires mu = 1/eps");
  }
}

double ModelParams::rotation() const { return std::isinf(eps) ? 0.0 : 1.0 / eps; }

double dispersion_A(double k) { return (1.0 + std::sqrt(4.0 * k * k + 1.0)) / (2.0 * k); }
double dispersion_B(double k) { return (-1.0 + std::sqrt(4.0 * k * k + 1.0)) / (2.0 * k); }

Mat6 assemble_symbol(const Freq& xi, const ModelParams& p) {
  require_nonzero(xi, "assemble_symbol");
  const auto [x1, x2, x3] = xi;
  const double k2 = total_sq(xi);
  const double h2 = horizontal_sq(xi);
  const double rho = p.rotation();
  Mat6 M = Mat6::Zero();
  M(0, 0) = rho * x1 * x2 / k2;
  M(0, 1) = rho * (x2 * x2 + x3 * x3) / k2;
  M(1, 0) = -rho * (x1 * x1 + x3 * x3) / k2;
  M(1, 1) = -rho * x1 * x2 / k2;
  M(2, 0) = rho * x2 * x3 / k2;
  M(2, 1) = -rho * x1 * x3 / k2;
  for (int i = 0; i < 3; ++i) {
    M(i, i) += -p.nu * h2;
    M(i + 3, i + 3) += -p.nu_m * h2;
    M(i, i + 3) = -I * p.mu * x3;
    M(i + 3, i) = -I * p.mu * x3;
  }
  return M;
}

std::array<cplx, 6> eigenvalues(const Freq& xi, const ModelParams& p) {
  require_nonzero(xi, "eigenvalues");
  require_rotating(p, "eigenvalues");
  const double k = std::sqrt(total_sq(xi));
  const double d = -p.nu * horizontal_sq(xi);
  const double w = xi[2] / p.eps;
  const double A = dispersion_A(k);
  const double B = dispersion_B(k);
  return {cplx(d, w),     cplx(d, -w),     cplx(d, w * A),
          cplx(d, -w * A), cplx(d, w * B), cplx(d, -w * B)};
}

std::array<Vec6, 6> eigenvectors(const Freq& xi, const ModelParams& p) {
  require_nonzero(xi, "eigenvectors");
  require_rotating(p, "eigenvectors");
  require_nondegenerate(xi, "eigenvectors");
  const auto [x1, x2, x3] = xi;
  const double k = std::sqrt(total_sq(xi));
  const double A = dispersion_A(k);
  const double B = dispersion_B(k);
  const double s13 = x1 * x1 + x3 * x3;
  std::array<Vec6, 6> W;
  W[0] << 0.0, 0.0, 1.0, 0.0, 0.0, -1.0;
  W[1] << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  W[2] << A * (I * x3 * k + x1 * x2), -A * s13, A * (-I * x1 * k + x2 * x3),
      -I * x3 * k - x1 * x2, s13, I * x1 * k - x2 * x3;
  W[3] << A * (I * x3 * k - x1 * x2), A * s13, A * (-I * x1 * k - x2 * x3),
      I * x3 * k - x1 * x2, s13, -I * x1 * k - x2 * x3;
  W[4] << B * (-I * x3 * k + x1 * x2), -B * s13, B * (I * x1 * k + x2 * x3),
      I * x3 * k - x1 * x2, s13, -I * x1 * k - x2 * x3;
  W[5] << B * (-I * x3 * k - x1 * x2), B * s13, B * (I * x1 * k - x2 * x3),
      -I * x3 * k - x1 * x2, s13, I * x1 * k - x2 * x3;
  return W;
}

cplx characteristic_polynomial(cplx Y, const Freq& xi, const ModelParams& p) {
  require_nonzero(xi, "characteristic_polynomial");
  const double w2 = xi[2] * xi[2] / (p.eps * p.eps);
  const double c = 1.0 / total_sq(xi) + 3.0;
  return ((Y + w2 * c) * Y + w2 * w2 * c) * Y + w2 * w2 * w2;
}

bool is_degenerate(const Freq& xi) { return xi[2] == 0.0; }

Mat4 cramer_matrix(const Freq& xi, const ModelParams& p) {
  const auto W = eigenvectors(xi, p);
  constexpr std::array<int, 4> rows = {0, 1, 3, 4};
  Mat4 D;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) D(r, c) = W[c + 2](rows[r]);
  return D;
}

double cramer_det_closed_form(const Freq& xi) {
  const auto [x1, x2, x3] = xi;
  const double s13 = x1 * x1 + x3 * x3;
  return 4.0 * x3 * x3 * s13 * s13 * (4.0 * total_sq(xi) + 1.0);
}

std::array<cplx, 4> cramer_coefficients(const Vec6& U0, const Freq& xi,
                                        const ModelParams& p) {
  require_nonzero(xi, "cramer_coefficients");
  require_nondegenerate(xi, "cramer_coefficients");
  const auto [x1, x2, x3] = xi;
  const double k = std::sqrt(total_sq(xi));
  const double scale = U0.norm() * k;
  const cplx du = x1 * U0(0) + x2 * U0(1) + x3 * U0(2);
  const cplx db = x1 * U0(3) + x2 * U0(4) + x3 * U0(5);
  if (std::abs(du) > 1e-10 * scale || std::abs(db) > 1e-10 * scale) {
    throw InvariantError("cramer_coefficients: (u, b) is not divergence-free at this mode");
  }
  const Mat4 D = cramer_matrix(xi, p);
  const cplx det = D.determinant();
  Eigen::Matrix<cplx, 4, 1> rhs;
  rhs << U0(0), U0(1), U0(3), U0(4);
  std::array<cplx, 4> C;
  for (int i = 0; i < 4; ++i) {
    Mat4 Di = D;
    Di.col(i) = rhs;
    C[i] = Di.determinant() / det;
  }
  return C;
}

ModeEigenSystem mode_eigensystem(const Freq& xi, const ModelParams& p) {
  require_nonzero(xi, "mode_eigensystem");
  ModeEigenSystem m;
  m.xi = xi;
  const double k = std::sqrt(total_sq(xi));
  m.A = dispersion_A(k);
  m.B = dispersion_B(k);
  m.lambdas = eigenvalues(xi, p);
  m.degenerate = is_degenerate(xi);
  if (!m.degenerate) m.W = eigenvectors(xi, p);
  return m;
}

ModeEigenSystem decompose_initial(const Vec6& U0, const Freq& xi,
                                  const ModelParams& p) {
  ModeEigenSystem m = mode_eigensystem(xi, p);
  m.C = cramer_coefficients(U0, xi, p);
  return m;
}

Mat6 expm(const Mat6& M) {
  static constexpr double b[14] = {64764752532480000.0,
                                   32382376266240000.0,
                                   7771770303897600.0,
                                   1187353796428800.0,
                                   129060195264000.0,
                                   10559470521600.0,
                                   670442572800.0,
                                   33522128640.0,
                                   1323241920.0,
                                   40840800.0,
                                   960960.0,
                                   16380.0,
                                   182.0,
                                   1.0};
  constexpr double theta13 = 5.371920351148152;
  if (!M.allFinite()) throw NumericalError("expm: non-finite matrix entry");
  if (one_norm(M) > 1e6) throw NumericalError("expm: ||M||_1 > 1e6, refusing to exponentiate");

  const cplx shift = M.trace() / 6.0;
  Mat6 A = M - shift * Mat6::Identity();
  const double norm = one_norm(A);
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  if (s > 0) A /= std::ldexp(1.0, s);

  const Mat6 Id = Mat6::Identity();
  const Mat6 A2 = A * A;
  const Mat6 A4 = A2 * A2;
  const Mat6 A6 = A4 * A2;
  const Mat6 U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
                      b[5] * A4 + b[3] * A2 + b[1] * Id);
  const Mat6 V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 +
                 b[2] * A2 + b[0] * Id;
  Mat6 R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) R = R * R;
  return std::exp(shift) * R;
}

Mat6 expm_oracle(const Mat6& M, double t) {
  if (t == 0.0) return Mat6::Identity();
  return expm(t * M);
}

Mat6 eigen_propagator(const Freq& xi, const ModelParams& p, double t) {
  const auto W = eigenvectors(xi, p);
  const auto lam = eigenvalues(xi, p);
  const Mat4 Dinv = cramer_matrix(xi, p).inverse();
  Eigen::Matrix<cplx, 6, 4> WE;
  for (int i = 0; i < 4; ++i) WE.col(i) = W[i + 2] * std::exp(lam[i + 2] * t);
  Eigen::Matrix<cplx, 4, 6> DS = Eigen::Matrix<cplx, 4, 6>::Zero();
  constexpr std::array<int, 4> cols = {0, 1, 3, 4};
  for (int c = 0; c < 4; ++c) DS.col(cols[c]) = Dinv.col(c);
  return WE * DS;
}

ModeRoute route_mode(const Freq& xi, const std::optional<CutoffBand>& cutoff) {
  const double k2 = total_sq(xi);
  if (k2 == 0.0) return ModeRoute::identity;
  if (is_degenerate(xi)) return ModeRoute::expm;
  if (cutoff) return psi(xi, cutoff->r, cutoff->R) > 0.0 ? ModeRoute::eigen : ModeRoute::expm;
  const double cond = xi[2] * xi[2] * (xi[0] * xi[0] + xi[2] * xi[2]) / (k2 * k2);
  return cond >= 1e-6 ? ModeRoute::eigen : ModeRoute::expm;
}

ExactPropagator::ExactPropagator(const Grid& g, const ModelParams& p, double t,
                                 std::optional<CutoffBand> cutoff, bool retained_only)
    : grid_(g), t_(t) {
  p.validate();
  const bool closed_form = p.kind == SystemKind::rotating;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (retained_only && !g.retained(i)) continue;
    const Freq xi = g.op_frequency(i);
    ModeRoute route = route_mode(xi, cutoff);
    if (route == ModeRoute::eigen && !closed_form) route = ModeRoute::expm;
    ++counts_[static_cast<int>(route)];
    if (route == ModeRoute::identity) continue;
    modes_.push_back(i);
    mats_.push_back(route == ModeRoute::eigen ? eigen_propagator(xi, p, t)
                                              : expm_oracle(assemble_symbol(xi, p), t));
  }
}

void ExactPropagator::apply(StateVector& U) const {
  require_same_grid(U.grid(), grid_, "ExactPropagator::apply");
  for (std::size_t n = 0; n < modes_.size(); ++n) {
    const std::size_t i = modes_[n];
    const Mat6& P = mats_[n];
    cplx v[6] = {U.u.comp[0][i], U.u.comp[1][i], U.u.comp[2][i],
                 U.b.comp[0][i], U.b.comp[1][i], U.b.comp[2][i]};
    for (int r = 0; r < 6; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < 6; ++c) acc += P(r, c) * v[c];
      (r < 3 ? U.u.comp[r] : U.b.comp[r - 3])[i] = acc;
    }
  }
}

std::shared_ptr<const ExactPropagator> cached_propagator(
    const Grid& g, const ModelParams& p, double t, std::optional<CutoffBand> cutoff) {
  using Key = std::tuple<int, int, std::uint64_t, std::uint64_t, int, std::uint64_t,
                         std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t,
                         std::uint64_t, std::uint64_t>;
  auto bits = [](double x) { return std::bit_cast<std::uint64_t>(x); };
  const Key key{g.n_h(),
                g.n_v(),
                bits(g.box_h()),
                bits(g.box_v()),
                static_cast<int>(p.kind),
                bits(p.eps),
                bits(p.nu),
                bits(p.nu_m),
                bits(p.mu),
                bits(t),
                bits(cutoff ? cutoff->r : -1.0),
                bits(cutoff ? cutoff->R : -1.0)};
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const ExactPropagator>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    // Keep memory bounded across long sweeps.
    if (cache.size() > 16) {
      cache.clear();
      auto& fresh = cache[key];
      fresh = std::make_shared<const ExactPropagator>(g, p, t, cutoff);
      return fresh;
    }
    slot = std::make_shared<const ExactPropagator>(g, p, t, cutoff);
  }
  return slot;
}

StateVector propagate_exact(const StateVector& U, double t, const ModelParams& p,
                            std::optional<CutoffBand> cutoff) {
  if (!(t >= 0.0)) throw ParameterError("propagate_exact: t must be >= 0");
  const ExactPropagator prop(U.grid(), p, t, cutoff, false);
  return prop(U);
}

}  // namespace rotmhd
