// Serial reference kernels against their OpenMP counterparts on a 64^3 field.
// Thread count follows OMP_NUM_THREADS / NSLOG_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "nslog/diagnostics.hpp"
#include "nslog/fft.hpp"
#include "nslog/initial_data.hpp"
#include "nslog/parallel.hpp"
#include "nslog/reference.hpp"
#include "nslog/spectral.hpp"

namespace {

using namespace nslog;

const SpecField& field(std::size_t n) {
  static std::map<std::size_t, SpecField> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    RandomFieldSpec spec;
    spec.k_hi = static_cast<double>(n) / 4;
    spec.seed = 5;
    it = cache.emplace(n, forward(make_random_divfree(Grid({n, n, n}), spec))).first;
  }
  return it->second;
}

const PhysField& physical(std::size_t n) {
  static std::map<std::size_t, PhysField> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, inverse(field(n))).first;
  return it->second;
}

template <class F>
void run(benchmark::State& st, F&& f) {
  for (auto _ : st) benchmark::DoNotOptimize(f());
  st.counters["threads"] = par::thread_limit();
}

#define PAIR(name, serial_expr, parallel_expr)                                             \
  void BM_##name##_serial(benchmark::State& st) {                                          \
    const auto n = static_cast<std::size_t>(st.range(0));                                 \
    run(st, [&] { return serial_expr; });                                                  \
  }                                                                                        \
  void BM_##name##_omp(benchmark::State& st) {                                             \
    const auto n = static_cast<std::size_t>(st.range(0));                                 \
    run(st, [&] { return parallel_expr; });                                                \
  }                                                                                        \
  BENCHMARK(BM_##name##_serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);         \
  BENCHMARK(BM_##name##_omp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)

PAIR(fractional_laplacian, serial::fractional_laplacian(field(n), 0.75), fractional_laplacian(field(n), 0.75));
PAIR(leray_project, serial::leray_project(field(n)), leray_project(field(n)));
PAIR(nonlinear, serial::nonlinear_conservative(field(n)), nonlinear_conservative(field(n)));
PAIR(l2_norm, serial::l2_norm(field(n)), l2_norm(field(n)));
PAIR(lq_norm, serial::lq_norm(physical(n), 12.0), lq_norm(physical(n), 12.0));
PAIR(grad_linf, serial::grad_linf(field(n)), grad_linf(field(n)));
PAIR(shell_energy, serial::shell_energy(field(n), 1.0, n), diag::shell_energy(field(n), 1.0, n));

}  // namespace

int main(int argc, char** argv) {
  par::init_from_env();
  for (std::size_t n : {32, 64}) physical(n);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
