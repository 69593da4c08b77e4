#pragma once

#include <limits>
#include <span>
#include <vector>

#include "mlheat/grid.hpp"

namespace mlheat {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Heat kernel (4 pi t)^{-N/2} exp(-|x|^2 / 4t) sampled pointwise.
Field gaussian_kernel(const GridSpec& grid, double t);

/// alpha-stable kernel, built as exp(-t |xi|^alpha) applied to the discrete
/// delta. alpha must lie in (0, 2); `diagnostic` admits alpha = 2.
/// Throws NumericalError if the discrete mass misses 1 by more than 1e-4.
Field stable_kernel(const GridSpec& grid, double alpha, double t, bool diagnostic = false);

/// Mixed kernel P_2(t) * P_alpha(t), built as exp(-t (|xi|^2 + |xi|^alpha))
/// applied to the discrete delta. Mass must be 1 within 1e-6.
Field mixed_kernel(const GridSpec& grid, double alpha, double t, bool diagnostic = false);

/// max(0, -min f) / max f; the size of the negative ripple relative to the peak.
double negative_ripple(const Field& f);

/// Discrete L^q norm (cell-volume weighted); q = kInfNorm gives max |f|.
double lq_norm(const Field& f, double q);

/// L^q norm of |grad f|, gradient taken spectrally.
double gradient_lq_norm(const Field& f, double q);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct TaylorContraction {
  std::vector<double> errors;     ///< ||E(t) * g - M_g E(t)||_1 per requested t
  double first_moment_norm = 0;   ///< ||x g(x)||_1
  double mass = 0;                ///< M_g
};

/// Distance between the evolved profile and the mass-weighted kernel.
TaylorContraction taylor_contraction_error(const Field& g, double alpha, std::span<const double> times);

/// Far-field mass of P_alpha(t) outside the ball of radius `half_width`,
/// from the |x|^{-N-alpha} asymptotics.
double stable_tail_mass(int dim, double alpha, double t, double half_width);

/// Half-width at which stable_tail_mass drops to `tol`.
double tail_policy_half_width(int dim, double alpha, double t, double tol);

/// Grid on which mixed kernels for t in [t_min, t_max] are resolved to about
/// `rel_tol`: spectral truncation below rel_tol at t_min and Riemann-sum error
/// of the |xi|^alpha cusp below rel_tol at t_max. Throws ConfigError when the
/// required point count exceeds `max_points`.
GridSpec resolving_grid(int dim, double alpha, double t_min, double t_max, double rel_tol,
                        std::size_t max_points = std::size_t{1} << 22);

struct DecayFit {
  std::vector<double> times;
  std::vector<double> norms;
  double slope = 0;
};

/// Fits the log-log slope of ||E_alpha(t)||_q over log-spaced t in [t_lo, t_hi].
DecayFit kernel_decay_fit(const GridSpec& grid, double alpha, double q, double t_lo, double t_hi,
                          int samples = 5);

}  // namespace mlheat
