#pragma once

#include <functional>
#include <span>

namespace mlheat::quad {

struct Estimate {
  double value = 0;
  double error = 0;  ///< estimated absolute error
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]: the interval with the
/// largest error estimate is bisected until the total estimate is below
/// max(abs_tol, rel_tol |value|) or `max_intervals` is reached.
Estimate gauss_kronrod(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                       double abs_tol = 0.0, int max_intervals = 2000);

/// Gauss-Kronrod over consecutive panels [breaks[i], breaks[i+1]]; errors add.
Estimate gauss_kronrod_panels(const Integrand& f, std::span<const double> breaks,
                              double rel_tol = 1e-12, double abs_tol = 0.0);

/// Adaptive Simpson on each panel between consecutive breakpoints.
double adaptive_simpson(const Integrand& f, std::span<const double> breaks, double tol = 1e-10,
                        int max_depth = 50);

}  // namespace mlheat::quad
