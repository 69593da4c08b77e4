#pragma once

#include <functional>
#include <utility>

#include "mlheat/grid.hpp"
#include "mlheat/quadrature.hpp"

namespace mlheat {

/// C_{N,s} = s 4^s Gamma(N/2 + s) / (pi^{N/2} Gamma(1 - s)).
double frac_constant(int dim, double s);

/// (1 + |x / scale|^2)^{-q0/2}.
double bracket_profile(const Point& x, double scale, double q0);

/// A bounded C^2 function with a hint of where it varies: `center` is its
/// main feature and `scale` the feature width. The hints only place
/// quadrature breakpoints.
struct Profile {
  int dim = 1;
  std::function<double(const Point&)> value;
  Point center{0.0, 0.0};
  double scale = 1.0;

  static Profile bracket(int dim, double scale, double q0);
  static Profile gaussian(int dim, double width);
  static Profile constant(int dim, double c);

  Profile translated(const Point& shift) const;
  /// x -> value(x / R)
  Profile dilated(double R) const;
};

/// (-Delta)^s profile at x via the symmetric second-difference integral.
/// Throws NumericalError when the estimated absolute error exceeds 1e-8.
quad::Estimate frac_laplacian_pointwise_estimate(const Profile& profile, double s, const Point& x);
double frac_laplacian_pointwise(const Profile& profile, double s, const Point& x);

/// ((-Delta)^s [profile(./R)](x), R^{-2s} (-Delta)^s [profile](x/R))
std::pair<double, double> scaling_check(const Profile& profile, double s, double R, const Point& x);

enum class Ramp { cos2 };

/// psi = 1 on [0,1], cos^2(pi (r-1)/2) on [1,2], 0 beyond.
double psi_ramp(double r, Ramp ramp = Ramp::cos2);
double psi_ramp_derivative(double r, Ramp ramp = Ramp::cos2);

class TestFunctionSpec {
 public:
  /// Throws ConfigError unless N < q0 < N + alpha p, B >= 1, R >= 1, p > 1, alpha in (0, 2).
  static TestFunctionSpec make(int dim, double alpha, double p, double q0, double B, double R,
                               Ramp ramp = Ramp::cos2);

  int dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }
  double p() const noexcept { return p_; }
  double q0() const noexcept { return q0_; }
  double B() const noexcept { return B_; }
  double R() const noexcept { return R_; }
  double ell() const noexcept { return (2.0 * p_ - 1.0) / (p_ - 1.0); }
  Ramp ramp() const noexcept { return ramp_; }
  /// Far-field decay exponent of the capacity integrand.
  double decay_exponent() const noexcept;

  TestFunctionSpec with_R(double R) const { return make(dim_, alpha_, p_, q0_, B_, R, ramp_); }

 private:
  TestFunctionSpec() = default;
  int dim_ = 1;
  double alpha_ = 1, p_ = 2, q0_ = 1.5, B_ = 1, R_ = 1;
  Ramp ramp_ = Ramp::cos2;
};

/// -Delta of bracket_profile(., scale, q0), closed form.
double bracket_neg_laplacian(int dim, const Point& x, double scale, double q0);

/// Integral of Phi^{-1/(p-1)} |(-Delta + (-Delta)^{alpha/2}) Phi|^{p/(p-1)} with
/// Phi = bracket_profile(., B R, q0). 1D: trapezoid on the grid nodes (even
/// symmetry, x >= 0 only). 2D: radial integral out to the grid half-width.
/// Throws ConfigError when the estimated tail beyond the box exceeds 1e-6 of
/// the result.
double capacity_integral(const TestFunctionSpec& spec, const GridSpec& grid);

/// Same quantity through x = (B R) y: `unit_grid` is in y units and the
/// local and nonlocal parts are weighted by (B R)^{-2} and (B R)^{-alpha}.
double capacity_integral_rescaled(const TestFunctionSpec& spec, const GridSpec& unit_grid);

/// Grid for capacity_integral with spacing at most `spacing_units` (B R) and
/// a box wide enough for the tail policy.
GridSpec capacity_grid(const TestFunctionSpec& spec, double spacing_units = 0.5, double tail_tol = 1e-6);

/// int_0^2 eta^{beta/((beta+1)(p-1))} psi |psi'|^{p/(p-1)} d eta
double time_factor_ramp(double p, double beta, Ramp ramp = Ramp::cos2);
/// int_0^2 eta^{beta/((beta+1)(p-1))} psi^ell d eta
double time_factor_profile(double p, double beta, double ell, Ramp ramp = Ramp::cos2);

}  // namespace mlheat
