// OpenMP / FFT kernels against their serial reference implementations.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mlheat/grid.hpp"
#include "mlheat/parallel.hpp"
#include "mlheat/reference.hpp"
#include "mlheat/spectral.hpp"

using namespace mlheat;

namespace {

std::vector<double> random_values(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Field bump(std::size_t n) {
  return Field::sample(GridSpec::make(1, 16.0, n), [](const Point& x) { return std::exp(-x[0] * x[0]); });
}

void BM_sum_parallel(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(par::sum(v));
}
void BM_sum_serial(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::sum(v));
}

void BM_absorb_parallel(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out(v.size());
  for (auto _ : st) {
    par::absorb(v, out, 0.1, 3.0);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_absorb_serial(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::absorb(v, 0.1, 3.0));
}

void BM_convolve_fft(benchmark::State& st) {
  const Field f = bump(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(convolve(f, f));
}
void BM_convolve_direct(benchmark::State& st) {
  const Field f = bump(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::direct_convolution(f, f));
}

void BM_multiplier_fft(benchmark::State& st) {
  const Field f = bump(static_cast<std::size_t>(st.range(0)));
  const auto sym = SpectralSymbol::mixed(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(apply_symbol(f, sym, 0.5, SymbolMode::semigroup));
}
void BM_multiplier_dft(benchmark::State& st) {
  const Field f = bump(static_cast<std::size_t>(st.range(0)));
  const auto sym = SpectralSymbol::mixed(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(reference::dft_apply(f, [&](double xi) { return std::exp(-0.5 * sym(xi)); }));
}

}  // namespace

BENCHMARK(BM_sum_parallel)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_sum_serial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_absorb_parallel)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_absorb_serial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_convolve_fft)->Range(1 << 8, 1 << 12);
BENCHMARK(BM_convolve_direct)->Range(1 << 8, 1 << 12);
BENCHMARK(BM_multiplier_fft)->Range(1 << 8, 1 << 12);
BENCHMARK(BM_multiplier_dft)->Range(1 << 8, 1 << 12);

BENCHMARK_MAIN();
