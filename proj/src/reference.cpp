#include "mlheat/reference.hpp"

#include <cmath>
#include <numbers>

#include "mlheat/errors.hpp"

namespace mlheat::reference {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

Field dft_apply(const Field& f, const std::function<double(double)>& factor) {
  const GridSpec& g = f.grid();
  if (g.dim() != 1) throw ConfigError("reference DFT is one-dimensional");
  const std::size_t n = g.points();
  const double two_pi_n = 2.0 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> re(n, 0.0), im(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = two_pi_n * static_cast<double>((k * j) % n);
      re[k] += f[j] * std::cos(ang);
      im[k] -= f[j] * std::sin(ang);
    }
    const double m = factor(std::abs(g.frequency(k)));
    re[k] *= m;
    im[k] *= m;
  }
  Field out(g);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = two_pi_n * static_cast<double>((k * j) % n);
      acc += re[k] * std::cos(ang) - im[k] * std::sin(ang);
    }
    out[j] = acc / static_cast<double>(n);
  }
  return out;
}

Field direct_convolution(const Field& kernel, const Field& f) {
  const GridSpec& g = f.grid();
  const std::size_t n = g.points();
  const double cell = g.cell_volume();
  Field out(g);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += kernel[(i + n - j + n / 2) % n] * f[j];
      out[i] = cell * acc;
    }
    return out;
  }
  for (std::size_t i0 = 0; i0 < n; ++i0) {
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      double acc = 0.0;
      for (std::size_t j0 = 0; j0 < n; ++j0) {
        const std::size_t r0 = (i0 + n - j0 + n / 2) % n;
        for (std::size_t j1 = 0; j1 < n; ++j1) {
          const std::size_t r1 = (i1 + n - j1 + n / 2) % n;
          acc += kernel[r0 * n + r1] * f[j0 * n + j1];
        }
      }
      out[i0 * n + i1] = cell * acc;
    }
  }
  return out;
}

std::vector<double> absorb(std::span<const double> in, double H, double p) {
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double u = in[i];
    out[i] = u > 0.0 ? std::pow(std::pow(u, 1.0 - p) + (p - 1.0) * H, -1.0 / (p - 1.0)) : 0.0;
  }
  return out;
}

}  // namespace mlheat::reference
