#include "nslog/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "nslog/error.hpp"
#include "nslog/parallel.hpp"

namespace nslog::fft {

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex g_plan_mutex;

// Plans are built once per shape and never destroyed; FFTW new-array
// execution is thread safe, planning is not.
const Plans& plans_for(const Grid& g) {
  static std::map<std::vector<std::size_t>, Plans> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  const auto key = g.npts();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<int> dims(key.begin(), key.end());
  double* rbuf = fftw_alloc_real(g.npoints());
  fftw_complex* cbuf = fftw_alloc_complex(g.nmodes());
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.r2c = fftw_plan_dft_r2c(g.rank(), dims.data(), rbuf, cbuf, flags);
  p.c2r = fftw_plan_dft_c2r(g.rank(), dims.data(), cbuf, rbuf, flags);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!p.r2c || !p.c2r) throw NumericalError("fft: plan creation failed");
  return cache.emplace(key, p).first->second;
}

}  // namespace

void forward_scalar(const Grid& g, const double* in, cplx* out) {
  const Plans& p = plans_for(g);
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / static_cast<double>(g.npoints());
  par::for_each(g.nmodes(), [&](std::size_t i) { out[i] *= scale; });
}

void inverse_scalar(const Grid& g, const cplx* in, double* out) {
  const Plans& p = plans_for(g);
  // c2r overwrites its input.
  std::vector<cplx> scratch(in, in + g.nmodes());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace nslog::fft

namespace nslog {

SpecField forward(const PhysField& f) {
  f.require_finite();
  SpecField out(f.grid, f.ncomp);
  for (int c = 0; c < f.ncomp; ++c) fft::forward_scalar(f.grid, f.comp(c), out.comp(c));
  return out;
}

PhysField inverse(const SpecField& g) {
  PhysField out(g.grid, g.ncomp);
  for (int c = 0; c < g.ncomp; ++c) fft::inverse_scalar(g.grid, g.comp(c), out.comp(c));
  return out;
}

}  // namespace nslog
