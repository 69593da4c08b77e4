#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mlheat/errors.hpp"
#include "mlheat/grid.hpp"
#include "mlheat/trace.hpp"

namespace mlheat {

class AbsorptionSchedule {
 public:
  enum class Kind { constant, power, table };

  /// h(t) = c
  static AbsorptionSchedule constant(double c);
  /// h(t) = c (1 + t)^sigma
  static AbsorptionSchedule power(double c, double sigma);
  /// Piecewise-linear through (t_i, h_i), constant beyond the end knots.
  static AbsorptionSchedule table(std::vector<double> t, std::vector<double> h);

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<double>& knots_t() const noexcept { return t_; }
  const std::vector<double>& knots_h() const noexcept { return h_; }

  double operator()(double t) const;
  /// int_{t0}^{t1} h(s) ds; closed form for constant and power, adaptive
  /// Simpson with the knots as breakpoints for table.
  double integral(double t0, double t1) const;
  /// inf of h over [t0, t1]; t1 may be +inf.
  double inf(double t0, double t1) const;

 private:
  AbsorptionSchedule() = default;
  Kind kind_ = Kind::constant;
  double c_ = 1.0;
  double sigma_ = 0.0;
  std::vector<double> t_, h_;
};

/// tau = t^{beta+1} / (beta+1)
double tau_of(double t, double beta);
/// t = ((beta+1) tau)^{1/(beta+1)}
double t_of(double tau, double beta);

struct TimeMap {
  double beta = 0.0;
  double tau(double t) const { return tau_of(t, beta); }
  double t(double tau) const { return t_of(tau, beta); }
};

struct ProblemSpec {
  double alpha = 1.0;
  double beta = 0.0;
  double p = 2.0;
  AbsorptionSchedule schedule = AbsorptionSchedule::constant(1.0);
  Field u0;

  /// Throws ConfigError on alpha outside (0, 2), beta < 0, p <= 1, or u0
  /// negative or non-finite.
  void validate() const;
};

/// Strictly increasing tau nodes from 0, with a subset flagged as snapshots.
class StepSchedule {
 public:
  /// `steps` equal tau-steps up to tau_end; every `snapshot_every`-th node is a snapshot.
  static StepSchedule uniform(double tau_end, std::size_t steps, std::size_t snapshot_every = 0);
  /// Snapshot at each requested time t (converted with beta); gaps between
  /// snapshots split into equal steps no longer than max_dtau.
  static StepSchedule with_snapshots(std::span<const double> snapshot_t, double beta, double max_dtau);

  const std::vector<double>& taus() const noexcept { return taus_; }
  bool is_snapshot(std::size_t node) const { return snap_[node]; }
  std::size_t steps() const noexcept { return taus_.size() - 1; }
  double tau_end() const noexcept { return taus_.back(); }

 private:
  std::vector<double> taus_{0.0};
  std::vector<bool> snap_{true};
};

/// t_j = t_min rho^j for t_j <= t_max; t_max appended when not hit.
std::vector<double> geometric_times(double t_min, double t_max, double rho = 1.189207115002721);

struct ClipLog {
  double clipped_mass = 0.0;  ///< total mass added by clipping negatives to 0
  double worst_ripple = 0.0;  ///< max over steps of -min / max before clipping
};

/// exp(-dtau (|xi|^2 + |xi|^alpha)) applied spectrally; negatives clipped to 0
/// and logged when `log` is given.
Field linear_step(const Field& f, double dtau, double alpha, ClipLog* log = nullptr);

/// Exact pointwise solution of u' = -h(t) u^p over [t0, t1].
/// Throws ContractViolation on values below -1e-10 max f.
Field absorption_step(const Field& f, double t0, double t1, double p, const AbsorptionSchedule& h);

struct Snapshot {
  double t = 0;
  double tau = 0;
  Field u;
};

struct SolveOptions {
  bool keep_fields = true;
  /// Called after each completed step with the step index and the field; a
  /// test hook for fault injection.
  std::function<void(std::size_t, Field&)> after_step;
  /// Where the last good snapshot is written when a run fails. Empty: not written.
  std::filesystem::path failure_dir;
  /// Zero modes with |xi| above 2/3 of the Nyquist frequency after every
  /// linear step. Off by default; the absorption is pointwise and dissipative.
  bool dealias = false;
};

struct SolveResult {
  Field final_field;
  MassTrace trace;
  std::vector<Snapshot> snapshots;  ///< includes t = 0; fields present when keep_fields
  ClipLog clip;
};

/// Raised when an iterate stops being finite; carries the last good state.
class SolveFailure : public NumericalError {
 public:
  SolveFailure(const std::string& what, Snapshot last_good)
      : NumericalError(what), last_good_(std::move(last_good)) {}
  const Snapshot& last_good() const noexcept { return last_good_; }

 private:
  Snapshot last_good_;
};

/// Strang splitting per tau-step: absorption over the first half of the
/// step's t-interval, the exact linear flow over the full tau-step, then
/// absorption over the second half.
SolveResult solve(const ProblemSpec& problem, const StepSchedule& steps, const SolveOptions& options = {});

/// || u(t_i1) - E(tau_i1 - tau_i0) * u(t_i0) + int h(s) E(tau_i1 - tau(s)) * u^p(s) ds ||_1 / ||u(t_i1)||_1,
/// the s-integral by the trapezoid rule over the stored snapshots.
double duhamel_residual(const ProblemSpec& problem, std::span<const Snapshot> snapshots, std::size_t i0,
                        std::size_t i1);

struct ComparisonResult {
  double min_gap = 0;  ///< min over all steps and nodes of v - u
  double max_v = 0;
};

/// Runs u from problem.u0 and v from v0 in lockstep.
ComparisonResult comparison_check(const ProblemSpec& problem, const Field& v0, const StepSchedule& steps);

struct SelfConvergence {
  std::vector<std::size_t> steps;
  std::vector<double> differences;  ///< ||u_k - u_{k+1}||_2 between successive refinements
  double ratio = 0;                 ///< differences[0] / differences[1]
};

SelfConvergence self_convergence(const ProblemSpec& problem, double tau_end, std::size_t base_steps);

}  // namespace mlheat
