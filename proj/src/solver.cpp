#include "rotmhd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/fft.hpp"
#include "rotmhd/littlewood_paley.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/operators.hpp"

namespace rotmhd {
namespace {

constexpr cplx I(0.0, 1.0);

bool all_finite(const StateVector& U) {
  for (const auto* f : {&U.u, &U.b})
    for (const auto& c : f->comp)
      for (const auto& z : c)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// Backward-Euler solves (I - dt B)^{-1} per retained mode.
class ImplicitSolve {
 public:
  ImplicitSolve(const Grid& g, const ModelParams& p, double dt) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.retained(i)) continue;
      const Freq xi = g.op_frequency(i);
      if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) continue;
      modes_.push_back(i);
      mats_.push_back((Mat6::Identity() - dt * assemble_symbol(xi, p)).inverse());
    }
  }
  void apply(StateVector& U) const {
    for (std::size_t n = 0; n < modes_.size(); ++n) {
      const std::size_t i = modes_[n];
      Vec6 v;
      for (int c = 0; c < 3; ++c) {
        v(c) = U.u.comp[c][i];
        v(c + 3) = U.b.comp[c][i];
      }
      const Vec6 w = mats_[n] * v;
      for (int c = 0; c < 3; ++c) {
        U.u.comp[c][i] = w(c);
        U.b.comp[c][i] = w(c + 3);
      }
    }
  }

 private:
  std::vector<std::size_t> modes_;
  std::vector<Mat6> mats_;
};

// Per vertical block q: ||Delta_q U||^2 and ||Delta_q grad_h U||^2.
struct BlockEnergies {
  std::vector<double> plain;
  std::vector<double> grad;
};

BlockEnergies block_energies(const StateVector& U) {
  const Grid& g = U.grid();
  std::vector<double> e0(g.n_v(), 0.0), e1(g.n_v(), 0.0);
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double h2 = g.xi_h(i1) * g.xi_h(i1) + g.xi_h(i2) * g.xi_h(i2);
      for (int i3 = 0; i3 < g.n_v(); ++i3, ++idx) {
        double m = 0.0;
        for (int c = 0; c < 3; ++c) m += std::norm(U.u.comp[c][idx]) + std::norm(U.b.comp[c][idx]);
        e0[i3] += m;
        e1[i3] += h2 * m;
      }
    }
  const int qmax = max_block(g, Direction::vertical);
  BlockEnergies out{std::vector<double>(qmax + 2, 0.0), std::vector<double>(qmax + 2, 0.0)};
  for (int q = -1; q <= qmax; ++q) {
    for (int i3 = 0; i3 < g.n_v(); ++i3) {
      const double m = block_multiplier(std::abs(g.xi_v(i3)), q);
      out.plain[q + 1] += m * m * e0[i3];
      out.grad[q + 1] += m * m * e1[i3];
    }
    out.plain[q + 1] *= g.parseval_weight();
    out.grad[q + 1] *= g.parseval_weight();
  }
  return out;
}

double weighted_block_sum(const std::vector<double>& e, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const int q = static_cast<int>(k) - 1;
    acc += std::exp2(2.0 * q * s) * e[k];
  }
  return std::sqrt(acc);
}

double max_velocity(const StateVector& U) {
  const PhysicalField u = inverse_transform(U.u);
  double m = 0.0;
  for (std::size_t i = 0; i < u.comp[0].size(); ++i) {
    m = std::max(m, std::sqrt(u.comp[0][i] * u.comp[0][i] + u.comp[1][i] * u.comp[1][i] +
                              u.comp[2][i] * u.comp[2][i]));
  }
  return m;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver: t_end must be >= 0");
  if (cadence < 1) throw ConfigError("solver: cadence must be >= 1");
  if (!(blowup_factor > 1.0)) throw ConfigError("solver: blowup_factor must be > 1");
  if (!(bootstrap_constant > 0.0)) throw ConfigError("solver: bootstrap_constant must be > 0");
  if (cutoff && !(cutoff->r > 0.0 && cutoff->r < cutoff->R)) {
    throw ConfigError("solver: cutoff needs 0 < r < R");
  }
}

StateVector linear_rhs(const StateVector& U, const ModelParams& p) {
  const Grid& g = U.grid();
  StateVector out(g);
  const double rho = p.rotation();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [x1, x2, x3] = g.op_frequency(i);
    const double k2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (k2 == 0.0) continue;
    const double h2 = x1 * x1 + x2 * x2;
    const cplx u1 = U.u.comp[0][i], u2 = U.u.comp[1][i], u3 = U.u.comp[2][i];
    const cplx b1 = U.b.comp[0][i], b2 = U.b.comp[1][i], b3 = U.b.comp[2][i];
    const cplx c = -I * p.mu * x3;
    out.u.comp[0][i] = rho * (x1 * x2 * u1 + (x2 * x2 + x3 * x3) * u2) / k2 - p.nu * h2 * u1 + c * b1;
    out.u.comp[1][i] = rho * (-(x1 * x1 + x3 * x3) * u1 - x1 * x2 * u2) / k2 - p.nu * h2 * u2 + c * b2;
    out.u.comp[2][i] = rho * (x2 * x3 * u1 - x1 * x3 * u2) / k2 - p.nu * h2 * u3 + c * b3;
    out.b.comp[0][i] = -p.nu_m * h2 * b1 + c * u1;
    out.b.comp[1][i] = -p.nu_m * h2 * b2 + c * u2;
    out.b.comp[2][i] = -p.nu_m * h2 * b3 + c * u3;
  }
  return out;
}

StateVector nonlinear_tendency(const StateVector& U) {
  StateVector Q = quadratic_terms(U);
  StateVector out(project_leray(Q.u), std::move(Q.b));
  out *= -1.0;
  if (!all_finite(out)) throw NumericalError("nonlinear_tendency: non-finite values");
  return out;
}

StateVector full_rhs(const StateVector& U, const ModelParams& p) {
  StateVector out = linear_rhs(U, p);
  out += nonlinear_tendency(U);
  return out;
}

double dissipation_rate(const StateVector& U, const ModelParams& p) {
  return p.nu * horizontal_gradient_sq(U.u) + p.nu_m * horizontal_gradient_sq(U.b);
}

namespace {

StateVector with_forcing(const StateVector& U, const StateVector* F) {
  if (!F) return U;
  return U + *F;
}

StepOutput step_if_rk4(const StateVector& U, double dt, const ExactPropagator& E,
                       const ModelParams& p, const StateVector* F0) {
  std::optional<StateVector> Fh, F1;
  if (F0) {
    Fh = E(*F0);
    F1 = E(*Fh);
  }
  const StateVector* fh = Fh ? &*Fh : nullptr;
  const StateVector* f1 = F1 ? &*F1 : nullptr;

  const StateVector S1 = with_forcing(U, F0);
  const StateVector k1 = nonlinear_tendency(S1);

  StateVector U2 = U;
  U2.axpy(0.5 * dt, k1);
  E.apply(U2);
  const StateVector S2 = with_forcing(U2, fh);
  const StateVector k2 = nonlinear_tendency(S2);

  const StateVector EU = E(U);
  StateVector U3 = EU;
  U3.axpy(0.5 * dt, k2);
  const StateVector S3 = with_forcing(U3, fh);
  const StateVector k3 = nonlinear_tendency(S3);

  StateVector U4 = EU;
  U4.axpy(dt, k3);
  E.apply(U4);
  const StateVector S4 = with_forcing(U4, f1);
  const StateVector k4 = nonlinear_tendency(S4);

  StateVector next = U;
  next.axpy(dt / 6.0, k1);
  E.apply(next);
  next.axpy(dt / 3.0, k2);
  next.axpy(dt / 3.0, k3);
  E.apply(next);
  next.axpy(dt / 6.0, k4);

  const double diss = dt / 6.0 *
                      (dissipation_rate(S1, p) + 2.0 * dissipation_rate(S2, p) +
                       2.0 * dissipation_rate(S3, p) + dissipation_rate(S4, p));
  return {std::move(next), diss};
}

StepOutput step_imex(const StateVector& U, double dt, const ImplicitSolve& solve,
                     const ModelParams& p, const StateVector* F0) {
  const StateVector S = with_forcing(U, F0);
  StateVector next = U;
  next.axpy(dt, nonlinear_tendency(S));
  solve.apply(next);
  return {std::move(next), dt * dissipation_rate(S, p)};
}

}  // namespace

StepOutput step(const StateVector& U, double dt, const SolverConfig& cfg,
                const ModelParams& p, const StateVector* forcing) {
  if (cfg.integrator == Integrator::if_rk4) {
    const auto E = cached_propagator(U.grid(), p, 0.5 * dt, cfg.cutoff);
    return step_if_rk4(U, dt, *E, p, forcing);
  }
  const ImplicitSolve solve(U.grid(), p, dt);
  return step_imex(U, dt, solve, p, forcing);
}

RunResult run(const StateVector& U0, const SolverConfig& cfg, const ModelParams& p,
              RunMode mode) {
  cfg.validate();
  p.validate();
  const Grid& g = U0.grid();
  require_divergence_free(U0.u, "run");
  require_divergence_free(U0.b, "run");

  RunResult res(g);
  res.bootstrap_threshold = std::pow(p.eps, p.alpha) / (2.0 * cfg.bootstrap_constant);

  StateVector start = U0;
  dealias(start);
  if (l2_norm(start - U0) > 1e-12 * l2_norm(U0)) {
    res.warnings.push_back("initial data had energy outside the 2/3 box; it was truncated");
  }

  const bool split = mode == RunMode::coupled_split;
  if (split && !cfg.cutoff) throw ConfigError("run: coupled-split mode needs a cutoff (r, R)");

  StateVector low(g), evolving = start;
  if (split) {
    SplitResult parts = split_initial_data(start, cfg.cutoff->r, cfg.cutoff->R, p);
    low = std::move(parts.low);
    evolving = std::move(parts.high);
  }

  const long long n_steps = std::llround(cfg.t_end / cfg.dt);
  if (std::abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * std::max(1.0, cfg.t_end)) {
    res.warnings.push_back("t_end is not a multiple of dt; final time is " +
                           std::to_string(n_steps * cfg.dt));
  }
  const double kmax = std::max(g.dealias_kmax_h() * 2.0 * M_PI / g.box_h(),
                               g.dealias_kmax_v() * 2.0 * M_PI / g.box_v());
  const double cfl = cfg.dt * max_velocity(start) * kmax;
  if (cfl > 1.0) {
    res.warnings.push_back("advisory: dt * max|u| * max|xi| = " + std::to_string(cfl) + " > 1");
  }

  std::shared_ptr<const ExactPropagator> E;
  std::unique_ptr<ImplicitSolve> implicit;
  if (cfg.integrator == Integrator::if_rk4 || split) {
    E = cached_propagator(g, p, 0.5 * cfg.dt, cfg.cutoff);
  }
  if (cfg.integrator == Integrator::imex_euler) {
    implicit = std::make_unique<ImplicitSolve>(g, p, cfg.dt);
  }

  auto total = [&](const StateVector& ev, const StateVector& lo) {
    return split ? ev + lo : ev;
  };
  const double energy0 = 0.5 * std::pow(l2_norm(start), 2);
  const double h0s0 = h0s_norm(start, p.s);
  const double threshold = cfg.blowup_factor * std::max(h0s0, 1e-300);

  const int nq = max_block(g, Direction::vertical) + 2;
  std::vector<double> sup_blocks(nq, 0.0), int_grad_blocks(nq, 0.0);
  double dissipation = 0.0;

  auto record = [&](double t, const StateVector& ev, const StateVector& lo, bool blow) {
    const StateVector U = total(ev, lo);
    DiagnosticsRecord r;
    r.t = t;
    r.energy = 0.5 * std::pow(l2_norm(U), 2);
    r.h_gradient = horizontal_gradient_sq(U);
    r.h0s = h0s_norm(U, p.s);
    r.dissipation = dissipation;
    r.energy_residual = r.energy - energy0 + dissipation;
    r.ltilde_inf = weighted_block_sum(sup_blocks, p.s);
    r.ltilde_2 = weighted_block_sum(int_grad_blocks, p.s);
    r.tilde_h0s = split ? h0s_norm(ev, p.s) : r.h0s;
    r.blowup = blow;
    res.records.push_back(r);
  };
  auto accumulate_blocks = [&](const StateVector& ev, double weight) {
    const BlockEnergies be = block_energies(ev);
    for (int k = 0; k < nq; ++k) {
      sup_blocks[k] = std::max(sup_blocks[k], be.plain[k]);
      int_grad_blocks[k] += weight * be.grad[k];
    }
  };

  accumulate_blocks(evolving, 0.5 * cfg.dt);
  res.sup_tilde_h0s = h0s_norm(evolving, p.s);
  record(0.0, evolving, low, false);

  for (long long n = 1; n <= n_steps; ++n) {
    StepOutput out{StateVector(g), 0.0};
    bool blow = false;
    try {
      out = cfg.integrator == Integrator::if_rk4
                ? step_if_rk4(evolving, cfg.dt, *E, p, split ? &low : nullptr)
                : step_imex(evolving, cfg.dt, *implicit, p, split ? &low : nullptr);
    } catch (const NumericalError&) {
      blow = true;
    }
    StateVector next_low = low;
    if (split && !blow) {
      E->apply(next_low);
      E->apply(next_low);
    }
    if (!blow) {
      const double h = h0s_norm(total(out.next, next_low), p.s);
      blow = !std::isfinite(h) || h > threshold || !std::isfinite(out.dissipation);
    }
    if (blow) {
      res.blowup = true;
      res.status = "blowup";
      record(n * cfg.dt, evolving, low, true);
      res.records.back().t = (n - 1) * cfg.dt;
      res.t_reached = (n - 1) * cfg.dt;
      break;
    }
    evolving = std::move(out.next);
    low = std::move(next_low);
    dissipation += out.dissipation;
    accumulate_blocks(evolving, n == n_steps ? 0.5 * cfg.dt : cfg.dt);
    res.sup_tilde_h0s = std::max(res.sup_tilde_h0s, h0s_norm(evolving, p.s));
    res.t_reached = n * cfg.dt;
    if (n % cfg.cadence == 0 || n == n_steps) record(n * cfg.dt, evolving, low, false);
  }

  res.final_state = total(evolving, low);
  if (split) {
    res.final_low = low;
    res.final_high = evolving;
  }
  return res;
}

TwinRunReport twin_run_divergence(const StateVector& U0, const StateVector& perturbation,
                                  const SolverConfig& cfg, const ModelParams& p) {
  cfg.validate();
  p.validate();
  require_divergence_free(U0.u, "twin_run_divergence");
  require_divergence_free(perturbation.u, "twin_run_divergence");
  require_divergence_free(perturbation.b, "twin_run_divergence");
  const Grid& g = U0.grid();
  StateVector A = U0, B = U0 + perturbation;
  dealias(A);
  dealias(B);
  const auto E = cfg.integrator == Integrator::if_rk4
                     ? cached_propagator(g, p, 0.5 * cfg.dt, cfg.cutoff)
                     : nullptr;
  std::unique_ptr<ImplicitSolve> implicit;
  if (!E) implicit = std::make_unique<ImplicitSolve>(g, p, cfg.dt);

  auto f_of = [&](const StateVector& X, const StateVector& Y) {
    auto n0 = [&](const SpectralField& v) { return std::pow(h0s_norm(v, p.s), 2); };
    auto n1 = [&](const SpectralField& v) {
      return std::pow(aniso_sobolev(v, {1.0, p.s, true, false}).value, 2);
    };
    return (1.0 + n0(X.u) + n0(Y.u) + n0(X.b) + n0(Y.b)) *
           (1.0 + n1(X.u) + n1(Y.u) + n1(X.b) + n1(Y.b));
  };

  TwinRunReport rep;
  const double d0 = h0s_norm(B - A, p.s - 1.0);
  double integral = 0.0;
  double f_prev = f_of(A, B);
  rep.t.push_back(0.0);
  rep.delta.push_back(d0);
  rep.f_integral.push_back(0.0);

  const long long n_steps = std::llround(cfg.t_end / cfg.dt);
  for (long long n = 1; n <= n_steps; ++n) {
    try {
      A = E ? step_if_rk4(A, cfg.dt, *E, p, nullptr).next
            : step_imex(A, cfg.dt, *implicit, p, nullptr).next;
      B = E ? step_if_rk4(B, cfg.dt, *E, p, nullptr).next
            : step_imex(B, cfg.dt, *implicit, p, nullptr).next;
    } catch (const NumericalError&) {
      rep.complete = false;
      rep.status = "blowup";
      break;
    }
    const double f_now = f_of(A, B);
    if (!std::isfinite(f_now)) {
      rep.complete = false;
      rep.status = "blowup";
      break;
    }
    integral += 0.5 * cfg.dt * (f_prev + f_now);
    f_prev = f_now;
    if (n % cfg.cadence == 0 || n == n_steps) {
      rep.t.push_back(n * cfg.dt);
      rep.delta.push_back(h0s_norm(B - A, p.s - 1.0));
      rep.f_integral.push_back(integral);
    }
  }
  double C = 0.0;
  if (d0 > 0.0) {
    for (std::size_t k = 1; k < rep.t.size(); ++k) {
      if (rep.f_integral[k] <= 0.0 || rep.delta[k] <= 0.0) continue;
      C = std::max(C, 2.0 * std::log(rep.delta[k] / d0) / rep.f_integral[k]);
    }
  }
  rep.fitted_C = C;
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    rep.envelope.push_back(d0 * std::exp(0.5 * C * rep.f_integral[k]));
  }
  return rep;
}

}  // namespace rotmhd
