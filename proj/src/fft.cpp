#include "rotmhd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "rotmhd/errors.hpp"

namespace rotmhd {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// FFTW's planner is not reentrant; execution of an existing plan is.
const PlanPair& plans_for(const Grid& g) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{g.n_h(), g.n_v()}];
  if (!slot) {
    slot = std::make_unique<PlanPair>();
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
    auto* in = fftw_alloc_complex(g.size());
    auto* out = fftw_alloc_complex(g.size());
    slot->forward = fftw_plan_dft_3d(g.n_h(), g.n_h(), g.n_v(), in, out,
                                     FFTW_FORWARD, flags);
    slot->backward = fftw_plan_dft_3d(g.n_h(), g.n_h(), g.n_v(), in, out,
                                      FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!slot->forward || !slot->backward) {
      throw NumericalError("fftw: plan creation failed");
    }
  }
  return *slot;
}

void check_span(const Grid& g, std::size_t n, const char* what) {
  if (n != g.size()) {
    throw ConfigError(std::string(what) + ": sample count " +
                      std::to_string(n) + " does not match grid size " +
                      std::to_string(g.size()));
  }
}

fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace

void dft_forward(const Grid& g, std::span<const cplx> in, std::span<cplx> out) {
  check_span(g, in.size(), "dft_forward");
  check_span(g, out.size(), "dft_forward");
  fftw_execute_dft(plans_for(g).forward, as_fftw(in.data()), as_fftw(out.data()));
}

void dft_inverse(const Grid& g, std::span<const cplx> in, std::span<cplx> out) {
  check_span(g, in.size(), "dft_inverse");
  check_span(g, out.size(), "dft_inverse");
  fftw_execute_dft(plans_for(g).backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& v : out) v *= scale;
}

void forward_real_pair(const Grid& g, std::span<const double> a,
                       std::span<const double> b, std::span<cplx> a_hat,
                       std::span<cplx> b_hat) {
  check_span(g, a.size(), "forward_real_pair");
  check_span(g, b.size(), "forward_real_pair");
  check_span(g, a_hat.size(), "forward_real_pair");
  check_span(g, b_hat.size(), "forward_real_pair");
  std::vector<cplx> packed(g.size());
  for (std::size_t i = 0; i < packed.size(); ++i) packed[i] = cplx(a[i], b[i]);
  std::vector<cplx> z(g.size());
  dft_forward(g, packed, z);
  const cplx half_i(0.0, -0.5);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const cplx zm = std::conj(z[g.mirror(i)]);
    a_hat[i] = 0.5 * (z[i] + zm);
    b_hat[i] = half_i * (z[i] - zm);
  }
}

void inverse_real_pair(const Grid& g, std::span<const cplx> a_hat,
                       std::span<const cplx> b_hat, std::span<double> a,
                       std::span<double> b) {
  check_span(g, a_hat.size(), "inverse_real_pair");
  check_span(g, b_hat.size(), "inverse_real_pair");
  check_span(g, a.size(), "inverse_real_pair");
  check_span(g, b.size(), "inverse_real_pair");
  std::vector<cplx> packed(g.size());
  const cplx i_unit(0.0, 1.0);
  for (std::size_t i = 0; i < packed.size(); ++i) {
    packed[i] = a_hat[i] + i_unit * b_hat[i];
  }
  std::vector<cplx> z(g.size());
  dft_inverse(g, packed, z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    a[i] = z[i].real();
    b[i] = z[i].imag();
  }
}

std::vector<cplx> forward_scalar(const Grid& g, std::span<const double> a) {
  check_span(g, a.size(), "forward_scalar");
  std::vector<cplx> packed(a.begin(), a.end());
  std::vector<cplx> out(g.size());
  dft_forward(g, packed, out);
  return out;
}

std::vector<double> inverse_scalar(const Grid& g, std::span<const cplx> a_hat) {
  std::vector<cplx> z(g.size());
  dft_inverse(g, a_hat, z);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

SpectralField forward_transform(const PhysicalField& f) {
  const Grid& g = f.grid;
  for (const auto& c : f.comp) check_span(g, c.size(), "forward_transform");
  SpectralField out(g);
  forward_real_pair(g, f.comp[0], f.comp[1], out.comp[0], out.comp[1]);
  out.comp[2] = forward_scalar(g, f.comp[2]);
  return out;
}

PhysicalField inverse_transform(const SpectralField& f) {
  const Grid& g = f.grid;
  for (const auto& c : f.comp) check_span(g, c.size(), "inverse_transform");
  PhysicalField out(g);
  inverse_real_pair(g, f.comp[0], f.comp[1], out.comp[0], out.comp[1]);
  out.comp[2] = inverse_scalar(g, f.comp[2]);
  return out;
}

}  // namespace rotmhd
