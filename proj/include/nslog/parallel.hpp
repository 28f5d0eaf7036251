#pragma once

// OpenMP helpers shared by the field kernels.
//
// Reductions are computed over fixed-size blocks and the block partials are
// combined serially in block order, so a sum is bit-identical for any thread
// count. Max reductions are order independent and use the OpenMP clause.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include <omp.h>

namespace nslog::par {

inline constexpr std::size_t kBlock = 2048;

/// Caps the number of OpenMP threads used by the kernels (values < 1 are ignored).
void set_thread_limit(int n);
int thread_limit();
/// Applies NSLOG_THREADS from the environment, if set.
void init_from_env();

template <class F>
void for_each(std::size_t n, F&& f) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

template <class F>
double sum(std::size_t n, F&& f) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class F>
double max(std::size_t n, F&& f) {
  double m = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < count; ++i) m = std::max(m, f(static_cast<std::size_t>(i)));
  return m;
}

/// Histogram-style accumulation: f(i, bins) adds into a block-local bin array.
/// Block arrays are merged in block order, so the result is thread-count invariant.
template <class F>
std::vector<double> bin_sum(std::size_t n, std::size_t nbins, F&& f) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(nblocks);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    auto& bins = partial[static_cast<std::size_t>(b)];
    bins.assign(nbins, 0.0);
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) f(i, bins);
  }
  std::vector<double> out(nbins, 0.0);
  for (const auto& bins : partial)
    for (std::size_t k = 0; k < nbins; ++k) out[k] += bins[k];
  return out;
}

}  // namespace nslog::par
