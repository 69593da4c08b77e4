#include "mlheat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "mlheat/errors.hpp"
#include "mlheat/parallel.hpp"

namespace mlheat {

SpectralSymbol SpectralSymbol::mixed(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("symbol alpha must lie in (0, 2]");
  return SpectralSymbol(alpha, true);
}

SpectralSymbol SpectralSymbol::fractional(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("symbol alpha must lie in (0, 2]");
  return SpectralSymbol(alpha, false);
}

double SpectralSymbol::operator()(double xi_abs) const noexcept {
  if (xi_abs == 0.0) return 0.0;
  const double nonlocal = alpha_ == 2.0 ? xi_abs * xi_abs : std::pow(xi_abs, alpha_);
  return local_ ? xi_abs * xi_abs + nonlocal : nonlocal;
}

namespace {

// The FFTW planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plans {
  Plans(int dim, std::size_t n) : real_size(dim == 1 ? n : n * n) {
    const std::size_t half = n / 2 + 1;
    complex_size = dim == 1 ? half : n * half;
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(real_size);
    cplx = fftw_alloc_complex(complex_size);
    const int ni = static_cast<int>(n);
    if (dim == 1) {
      r2c = fftw_plan_dft_r2c_1d(ni, real, cplx, FFTW_ESTIMATE);
      c2r = fftw_plan_dft_c2r_1d(ni, cplx, real, FFTW_ESTIMATE);
    } else {
      r2c = fftw_plan_dft_r2c_2d(ni, ni, real, cplx, FFTW_ESTIMATE);
      c2r = fftw_plan_dft_c2r_2d(ni, ni, cplx, real, FFTW_ESTIMATE);
    }
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  std::size_t real_size;
  std::size_t complex_size = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// One workspace per (thread, shape); runs on different threads never share one.
Plans& plans_for(const GridSpec& g) {
  thread_local std::map<std::pair<int, std::size_t>, std::unique_ptr<Plans>> cache;
  auto& slot = cache[{g.dim(), g.points()}];
  if (!slot) slot = std::make_unique<Plans>(g.dim(), g.points());
  return *slot;
}

void require_finite(const Field& f, const char* what) {
  if (!f.finite()) throw NumericalError(std::string("non-finite values in ") + what);
}

}  // namespace

Spectrum::Spectrum(const GridSpec& grid)
    : grid_(grid),
      data_(grid.dim() == 1 ? grid.points() / 2 + 1 : grid.points() * (grid.points() / 2 + 1)) {}

double Spectrum::frequency(std::size_t k, int axis) const noexcept {
  const double base = std::numbers::pi / grid_.half_width();
  if (grid_.dim() == 1) return base * static_cast<double>(k);
  const std::size_t nh = half_points();
  if (axis == 0) return grid_.frequency(k / nh);
  return base * static_cast<double>(k % nh);
}

double Spectrum::magnitude(std::size_t k) const noexcept {
  if (grid_.dim() == 1) return frequency(k, 0);
  const double a = frequency(k, 0);
  const double b = frequency(k, 1);
  return std::sqrt(a * a + b * b);
}

double Spectrum::weight(std::size_t k) const noexcept {
  const std::size_t last = grid_.dim() == 1 ? k : k % half_points();
  return (last == 0 || last == grid_.points() / 2) ? 1.0 : 2.0;
}

Spectrum forward(const Field& f) {
  Plans& p = plans_for(f.grid());
  const auto v = f.values();
  std::copy(v.begin(), v.end(), p.real);
  fftw_execute(p.r2c);
  Spectrum s(f.grid());
  auto& d = s.data();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = {p.cplx[k][0], p.cplx[k][1]};
  return s;
}

Field inverse(const Spectrum& s) {
  Plans& p = plans_for(s.grid());
  const auto& d = s.data();
  for (std::size_t k = 0; k < d.size(); ++k) {
    p.cplx[k][0] = d[k].real();
    p.cplx[k][1] = d[k].imag();
  }
  fftw_execute(p.c2r);
  Field out(s.grid());
  const double norm = 1.0 / static_cast<double>(p.real_size);
  auto v = out.values();
  par::for_each(v.size(), [&](std::size_t i) { v[i] = p.real[i] * norm; });
  return out;
}

std::vector<double> mode_table(const GridSpec& grid, const std::function<double(double)>& factor) {
  Spectrum probe(grid);
  std::vector<double> table(probe.size());
  par::for_each(table.size(), [&](std::size_t k) { table[k] = factor(probe.magnitude(k)); });
  return table;
}

Field apply_mode_factors(const Field& f, const std::vector<double>& factors) {
  require_finite(f, "spectral input");
  Spectrum s = forward(f);
  par::scale_spectrum(s.data(), factors);
  Field out = inverse(s);
  require_finite(out, "spectral output");
  return out;
}

Field apply_symbol(const Field& f, const SpectralSymbol& sym, double scale, SymbolMode mode) {
  if (!(scale >= 0.0)) throw ConfigError("symbol scale must be nonnegative");
  if (mode == SymbolMode::semigroup && scale == 0.0) return f;
  const auto table = mode == SymbolMode::multiplier
                         ? mode_table(f.grid(), [&](double xi) { return scale * sym(xi); })
                         : mode_table(f.grid(), [&](double xi) { return std::exp(-scale * sym(xi)); });
  return apply_mode_factors(f, table);
}

Field frac_laplacian_spectral(const Field& f, double alpha) {
  return apply_symbol(f, SpectralSymbol::fractional(alpha), 1.0, SymbolMode::multiplier);
}

Field spectral_derivative(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim()) throw ConfigError("derivative axis out of range");
  require_finite(f, "spectral input");
  Spectrum s = forward(f);
  auto& d = s.data();
  const std::size_t n = f.grid().points();
  const std::size_t nh = s.half_points();
  par::for_each(d.size(), [&](std::size_t k) {
    std::size_t idx = k;
    if (f.grid().dim() == 2) idx = axis == 0 ? k / nh : k % nh;
    if (idx == n / 2) {
      d[k] = 0.0;
    } else {
      d[k] *= std::complex<double>(0.0, s.frequency(k, axis));
    }
  });
  Field out = inverse(s);
  require_finite(out, "spectral output");
  return out;
}

Field convolve(const Field& kernel, const Field& f) {
  if (!(kernel.grid() == f.grid())) throw ConfigError("convolution operands on different grids");
  require_finite(kernel, "convolution kernel");
  require_finite(f, "convolution input");
  Spectrum a = forward(kernel);
  const Spectrum b = forward(f);
  auto& d = a.data();
  const auto& e = b.data();
  const std::size_t nh = a.half_points();
  const bool two_d = f.grid().dim() == 2;
  const double cell = f.grid().cell_volume();
  // Kernel origin sits at node n/2: shifting it to node 0 is a (-1)^k phase.
  par::for_each(d.size(), [&](std::size_t k) {
    const std::size_t parity = two_d ? (k / nh + k % nh) : k;
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    d[k] = d[k] * e[k] * (sign * cell);
  });
  Field out = inverse(a);
  require_finite(out, "convolution output");
  return out;
}

double spectral_l2_squared(const Field& f) {
  const Spectrum s = forward(f);
  const auto& d = s.data();
  const double total = par::sum(d.size(), [&](std::size_t k) { return s.weight(k) * std::norm(d[k]); });
  const double n = static_cast<double>(f.size());
  return f.grid().cell_volume() * total / n;
}

SemigroupPropagator::SemigroupPropagator(const GridSpec& grid, const SpectralSymbol& symbol, double dtau)
    : grid_(grid), dtau_(dtau) {
  if (!(dtau >= 0.0)) throw ConfigError("semigroup step must be nonnegative");
  factors_ = mode_table(grid, [&](double xi) { return std::exp(-dtau * symbol(xi)); });
}

Field SemigroupPropagator::apply(const Field& f) const {
  if (!(f.grid() == grid_)) throw ConfigError("propagator applied on a different grid");
  if (dtau_ == 0.0) return f;
  return apply_mode_factors(f, factors_);
}

}  // namespace mlheat
