#include "mlheat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlheat::par {

namespace {

template <class Op>
double blocked_fold(std::span<const double> v, double init, Op op) {
  const std::size_t n = v.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, init);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n);
    double acc = init;
    for (std::size_t i = lo; i < hi; ++i) acc = op(acc, v[i]);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double acc = init;
  for (double x : partial) acc = op(acc, x);
  return acc;
}

}  // namespace

double sum(std::span<const double> v) {
  return sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double min(std::span<const double> v) {
  return blocked_fold(v, std::numeric_limits<double>::infinity(),
                      [](double a, double b) { return std::min(a, b); });
}

double max(std::span<const double> v) {
  return blocked_fold(v, -std::numeric_limits<double>::infinity(),
                      [](double a, double b) { return std::max(a, b); });
}

double max_abs(std::span<const double> v) {
  return blocked_fold(v, 0.0, [](double a, double b) { return std::max(a, std::abs(b)); });
}

double sum_abs_pow(std::span<const double> v, double q) {
  if (q == 1.0) return sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
  if (q == 2.0) return sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; });
  return sum(v.size(), [&](std::size_t i) { return std::pow(std::abs(v[i]), q); });
}

double negative_mass(std::span<const double> v) {
  return sum(v.size(), [&](std::size_t i) { return v[i] < 0.0 ? -v[i] : 0.0; });
}

bool all_finite(std::span<const double> v) {
  // NaN propagates through the sum of zeros; Inf does too.
  const double s = sum(v.size(), [&](std::size_t i) { return v[i] * 0.0; });
  return s == 0.0;
}

void absorb(std::span<const double> in, std::span<double> out, double H, double p) {
  const double pm1 = p - 1.0;
  const double expo = -1.0 / pm1;
  for_each(in.size(), [&](std::size_t i) {
    const double u = in[i];
    out[i] = u > 0.0 ? u * std::pow(1.0 + pm1 * H * std::pow(u, pm1), expo) : (std::isnan(u) ? u : 0.0);
  });
}

void scale_spectrum(std::span<std::complex<double>> spec, std::span<const double> factor) {
  for_each(spec.size(), [&](std::size_t k) { spec[k] *= factor[k]; });
}

double clip_negative(std::span<double> v) {
  return sum(v.size(), [&](std::size_t i) {
    if (v[i] < 0.0) {
      const double m = -v[i];
      v[i] = 0.0;
      return m;
    }
    return 0.0;
  });
}

}  // namespace mlheat::par
