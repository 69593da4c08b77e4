#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mlheat/grid.hpp"

namespace mlheat {

/// Fourier multiplier of the diffusion operator. `mixed` is |xi|^2 + |xi|^alpha
/// (the mixed local-nonlocal operator); `fractional` is |xi|^alpha alone.
/// alpha = 2 is accepted but flagged as a diagnostic setting.
class SpectralSymbol {
 public:
  static SpectralSymbol mixed(double alpha);
  static SpectralSymbol fractional(double alpha);

  double alpha() const noexcept { return alpha_; }
  bool has_local_part() const noexcept { return local_; }
  bool diagnostic() const noexcept { return alpha_ == 2.0; }

  double operator()(double xi_abs) const noexcept;

 private:
  SpectralSymbol(double alpha, bool local) : alpha_(alpha), local_(local) {}
  double alpha_;
  bool local_;
};

enum class SymbolMode {
  multiplier,  ///< out^ = scale * m(xi) * f^
  semigroup,   ///< out^ = exp(-scale * m(xi)) * f^
};

/// Half-complex spectrum of a real field (FFTW r2c layout): n/2+1 modes in 1D,
/// n x (n/2+1) in 2D, unnormalised.
class Spectrum {
 public:
  explicit Spectrum(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t half_points() const noexcept { return grid_.points() / 2 + 1; }
  std::vector<std::complex<double>>& data() noexcept { return data_; }
  const std::vector<std::complex<double>>& data() const noexcept { return data_; }

  /// |xi| of mode k (Nyquist taken unsigned).
  double magnitude(std::size_t k) const noexcept;
  /// Signed frequency of mode k along `axis`.
  double frequency(std::size_t k, int axis) const noexcept;
  /// Multiplicity of mode k in the full spectrum (1 or 2).
  double weight(std::size_t k) const noexcept;

 private:
  GridSpec grid_;
  std::vector<std::complex<double>> data_;
};

Spectrum forward(const Field& f);
/// Inverse transform including the 1/n^N normalisation.
Field inverse(const Spectrum& s);

/// Table of factor(|xi|) over the modes of `grid`, in Spectrum order.
std::vector<double> mode_table(const GridSpec& grid, const std::function<double(double)>& factor);

/// Throws NumericalError if the input or the output is not finite.
Field apply_symbol(const Field& f, const SpectralSymbol& s, double scale, SymbolMode mode);
Field apply_mode_factors(const Field& f, const std::vector<double>& factors);

/// (-Delta)^{alpha/2} by the multiplier |xi|^alpha, alpha in (0, 2].
Field frac_laplacian_spectral(const Field& f, double alpha);

/// d/dx_axis by the multiplier i*xi; the Nyquist mode is zeroed.
Field spectral_derivative(const Field& f, int axis);

/// Periodic convolution kernel * f, where `kernel` is sampled on the same
/// grid with its origin at x = 0 (node n/2).
Field convolve(const Field& kernel, const Field& f);

/// integral of f^2 computed from the spectrum (Parseval).
double spectral_l2_squared(const Field& f);

/// Repeated semigroup steps exp(-dtau m(xi)) with the factor table cached.
class SemigroupPropagator {
 public:
  SemigroupPropagator(const GridSpec& grid, const SpectralSymbol& symbol, double dtau);
  double dtau() const noexcept { return dtau_; }
  Field apply(const Field& f) const;

 private:
  GridSpec grid_;
  double dtau_;
  std::vector<double> factors_;
};

}  // namespace mlheat
