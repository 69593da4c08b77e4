#pragma once

#include <string>
#include <vector>

#include "mlheat/grid.hpp"
#include "mlheat/solver.hpp"
#include "mlheat/trace.hpp"

namespace mlheat {

/// 1 + alpha / (N (beta + 1))
double critical_exponent(double alpha, double beta, int dim);

enum class Convergence { convergent, divergent };

struct ConditionH {
  Convergence verdict = Convergence::divergent;
  bool numeric = false;  ///< decided by the brute-force heuristic rather than in closed form
  std::string warning;
};

/// Whether int_1^inf t^{-N (p-1)(1+beta)/alpha} h(t) dt is finite. Closed
/// form for constant and power schedules; table schedules use
/// condition_h_numeric and carry a warning.
ConditionH condition_h_check(double p, double alpha, double beta, int dim, const AbsorptionSchedule& h);

/// Brute-force decision from the integral over [1, t_max]: compares the
/// increments over the last two decades; convergent when the last is below
/// 0.9 of the one before.
Convergence condition_h_numeric(double p, double alpha, double beta, int dim, const AbsorptionSchedule& h,
                                double t_max = 1e6);

enum class MassLimit { positive_plateau, decaying_to_zero, inconclusive };

std::string to_string(MassLimit m);
std::string to_string(Convergence c);

struct MassClassification {
  MassLimit verdict = MassLimit::inconclusive;
  double slope = 0;          ///< d log M / d log t over the window
  double relative_drop = 0;  ///< (M(window start) - M(end)) / M(window start)
  bool monotone = true;
  double M_inf_estimate = 0;
  bool from_ledger = false;  ///< estimate from M(0) - A rather than the last M
};

struct ClassifierThresholds {
  double plateau_slope = 0.01;
  double plateau_drop = 0.01;
  double decay_slope = -0.05;
  double ledger_tail = 1e-4;
};

/// Fits the mass trace over its trailing `window_decades` decades of t.
/// Throws ConfigError if the positive-time part of the trace spans fewer
/// than 2 decades.
MassClassification classify_mass_limit(const MassTrace& trace, double window_decades = 1.0,
                                       const ClassifierThresholds& th = {});

/// t^{(N/alpha)(1-1/q)(1+beta)} || u - M_inf E_alpha(tau(t)) ||_q
double profile_error(const Field& u, double M_inf, double t, double alpha, double beta, double q);

/// min{C t^{-N(beta+1)(p-1)/2} l1^p, C t^{-N(beta+1)(p-1)/alpha} l1^p, lp^p}
double h_bound_H(double t, double p, double alpha, double beta, int dim, double u0_l1, double u0_lp, double C = 1.0);

}  // namespace mlheat
