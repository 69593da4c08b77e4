#include "mlheat/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "mlheat/errors.hpp"
#include "mlheat/parallel.hpp"
#include "mlheat/spectral.hpp"

namespace mlheat {

namespace {

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("kernel time must be positive");
}

void check_alpha(double alpha, bool diagnostic) {
  const bool ok = diagnostic ? (alpha > 0.0 && alpha <= 2.0) : (alpha > 0.0 && alpha < 2.0);
  if (!ok) throw ConfigError("kernel alpha must lie in (0, 2)");
}

Field kernel_from_symbol(const GridSpec& grid, const SpectralSymbol& sym, double t, double mass_tol,
                         const char* name) {
  Field k = apply_symbol(Field::delta(grid), sym, t, SymbolMode::semigroup);
  const double mass = k.integral();
  if (!(std::abs(mass - 1.0) <= mass_tol)) {
    throw NumericalError(std::string(name) + " mass deviates from 1: " + std::to_string(mass));
  }
  return k;
}

double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

}  // namespace

Field gaussian_kernel(const GridSpec& grid, double t) {
  check_time(t);
  const double norm = std::pow(4.0 * std::numbers::pi * t, -0.5 * grid.dim());
  return Field::sample(grid, [&](const Point& x) {
    return norm * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4.0 * t));
  });
}

Field stable_kernel(const GridSpec& grid, double alpha, double t, bool diagnostic) {
  check_time(t);
  check_alpha(alpha, diagnostic);
  return kernel_from_symbol(grid, SpectralSymbol::fractional(alpha), t, 1e-4, "stable kernel");
}

Field mixed_kernel(const GridSpec& grid, double alpha, double t, bool diagnostic) {
  check_time(t);
  check_alpha(alpha, diagnostic);
  return kernel_from_symbol(grid, SpectralSymbol::mixed(alpha), t, 1e-6, "mixed kernel");
}

double negative_ripple(const Field& f) {
  const double hi = f.max();
  const double lo = f.min();
  if (!(hi > 0.0)) return lo < 0.0 ? kInfNorm : 0.0;
  return std::max(0.0, -lo) / hi;
}

double lq_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw ConfigError("norm exponent must be >= 1");
  if (std::isinf(q)) return par::max_abs(f.values());
  return std::pow(f.grid().cell_volume() * par::sum_abs_pow(f.values(), q), 1.0 / q);
}

double gradient_lq_norm(const Field& f, double q) {
  Field mag = spectral_derivative(f, 0);
  if (f.grid().dim() == 2) {
    const Field dy = spectral_derivative(f, 1);
    auto m = mag.values();
    par::for_each(m.size(), [&](std::size_t i) { m[i] = std::hypot(m[i], dy[i]); });
  }
  return lq_norm(mag, q);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ConfigError("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

TaylorContraction taylor_contraction_error(const Field& g, double alpha, std::span<const double> times) {
  TaylorContraction out;
  out.mass = g.integral();
  const double cell = g.grid().cell_volume();
  out.first_moment_norm = cell * par::sum(g.size(), [&](std::size_t i) {
    const Point x = g.point(i);
    return std::hypot(x[0], x[1]) * std::abs(g[i]);
  });
  const auto sym = SpectralSymbol::mixed(alpha);
  for (double t : times) {
    Field diff = apply_symbol(g, sym, t, SymbolMode::semigroup);
    diff -= out.mass * mixed_kernel(g.grid(), alpha, t);
    out.errors.push_back(lq_norm(diff, 1.0));
  }
  return out;
}

double stable_tail_mass(int dim, double alpha, double t, double half_width) {
  // P_alpha(x, 1) ~ A |x|^{-N-alpha}
  const double N = dim;
  const double A = alpha * std::pow(2.0, alpha - 1.0) * std::pow(std::numbers::pi, -N / 2.0 - 1.0) *
                   std::sin(std::numbers::pi * alpha / 2.0) * std::tgamma((N + alpha) / 2.0) *
                   std::tgamma(alpha / 2.0);
  return A * t * sphere_area(dim) * std::pow(half_width, -alpha) / alpha;
}

double tail_policy_half_width(int dim, double alpha, double t, double tol) {
  const double at_one = stable_tail_mass(dim, alpha, t, 1.0);
  return std::pow(at_one / tol, 1.0 / alpha);
}

GridSpec resolving_grid(int dim, double alpha, double t_min, double t_max, double rel_tol,
                        std::size_t max_points) {
  check_time(t_min);
  check_time(t_max);
  check_alpha(alpha, true);
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("rel_tol must lie in (0, 1)");
  const auto sym = SpectralSymbol::mixed(alpha);
  // Smallest xi with t * m(xi) >= target, by bisection on the monotone symbol.
  auto xi_where = [&](double t, double target) {
    double lo = 0.0, hi = 1.0;
    while (t * sym(hi) < target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (t * sym(mid) < target ? lo : hi) = mid;
    }
    return hi;
  };
  const double xi_max = xi_where(t_min, std::log(1.0 / rel_tol) + 2.0);
  const double xi_scale = xi_where(t_max, 1.0);
  // Riemann-sum error of the cusp -t|xi|^alpha is ~ |zeta(-alpha)| t dxi^{1+alpha};
  // |zeta(-alpha)| <= 1/2 on (0, 2).
  const double dxi_cusp = std::pow(rel_tol * xi_scale / (0.5 * t_max), 1.0 / (1.0 + alpha));
  const double dxi = std::min(dxi_cusp, 0.1 * xi_scale);
  const double L = std::numbers::pi / dxi;
  const auto wanted = static_cast<std::size_t>(std::ceil(2.0 * xi_max / dxi));
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(wanted, 16));
  const std::size_t total = dim == 1 ? n : n * n;
  if (total > max_points) {
    throw ConfigError("resolving grid needs " + std::to_string(total) + " points, above the cap");
  }
  return GridSpec::make(dim, L, n);
}

DecayFit kernel_decay_fit(const GridSpec& grid, double alpha, double q, double t_lo, double t_hi,
                          int samples) {
  if (samples < 2 || !(t_hi > t_lo)) throw ConfigError("decay fit needs t_hi > t_lo and >= 2 samples");
  DecayFit fit;
  for (int i = 0; i < samples; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (samples - 1));
    fit.times.push_back(t);
    fit.norms.push_back(lq_norm(mixed_kernel(grid, alpha, t), q));
  }
  fit.slope = loglog_slope(fit.times, fit.norms);
  return fit;
}

}  // namespace mlheat
