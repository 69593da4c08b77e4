#pragma once

// OpenMP data-parallel kernels. Every reduction is blocked with a fixed block
// size and the block partials are combined serially, so results are
// bit-identical for any OMP_NUM_THREADS. Serial counterparts live in
// reference.hpp and are used by the tests and the benchmark.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mlheat::par {

inline constexpr std::size_t kBlock = 2048;

/// Runs fn(i) for i in [0, n).
template <class Fn>
void for_each(std::size_t n, Fn&& fn) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// Deterministic sum of term(i) for i in [0, n).
template <class Fn>
double sum(std::size_t n, Fn&& term) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double sum(std::span<const double> v);
double min(std::span<const double> v);
double max(std::span<const double> v);
double max_abs(std::span<const double> v);
/// sum |v_i|^q
double sum_abs_pow(std::span<const double> v, double q);
/// sum of the negative parts, returned as a nonnegative number
double negative_mass(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// out_i = in_i * (1 + (p-1) H in_i^(p-1))^(-1/(p-1)), the exact flow of
/// u' = -h(t) u^p over an interval with integral(h) = H. Requires in_i >= 0.
void absorb(std::span<const double> in, std::span<double> out, double H, double p);

/// spec_k *= factor_k
void scale_spectrum(std::span<std::complex<double>> spec, std::span<const double> factor);

/// Clamps negatives to zero and returns the (nonnegative) mass added per unit
/// cell, i.e. sum of |negative values|.
double clip_negative(std::span<double> v);

}  // namespace mlheat::par
