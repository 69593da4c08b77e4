#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlheat/config.hpp"
#include "mlheat/observers.hpp"
#include "mlheat/solver.hpp"

namespace mlheat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// M N(shift, width^2) density sampled on the grid (shift along every axis).
Field gaussian_density(const GridSpec& grid, double mass, double width, double shift);

AbsorptionSchedule make_schedule(const ExperimentConfig& cfg);
ProblemSpec make_problem(const ExperimentConfig& cfg, double alpha, double beta, double p);
/// Geometric snapshots from snapshot_tmin to t_end, tau-steps <= dtau.
StepSchedule make_steps(const ExperimentConfig& cfg, double beta);

/// Solves one point and writes `dir`/trace.csv and, when requested,
/// `dir`/snapshots/ (FHK1 files plus index.csv). Honors inject_nan_step.
SolveResult run_solve(const ExperimentConfig& cfg, double alpha, double beta, double p,
                      const std::filesystem::path& dir);

struct ProfilePoint {
  double t = 0;
  double value = 0;
};

struct AnalysisReport {
  MassClassification classification;
  double ledger_residual = 0;
  double worst_mass_increase = 0;
  double initial_mass = 0;
  std::optional<double> critical_exponent;
  std::optional<ConditionH> condition_h;
  std::vector<ProfilePoint> profile_errors;  ///< q = 2, trailing window only
};

struct AnalyzeInputs {
  int dim = 1;
  double window_decades = 1.0;
  std::optional<double> alpha, beta, p;
  std::optional<AbsorptionSchedule> schedule;
  std::optional<std::filesystem::path> snapshot_dir;
};

AnalysisReport analyze(const MassTrace& trace, const AnalyzeInputs& in);
std::string to_json(const AnalysisReport& r);

struct SweepRow {
  double p = 0, alpha = 0, beta = 0;
  std::string classification;  ///< "failed" when the point raised
  double M_inf_estimate = 0;
  double critical_exponent = 0;
  std::string condition_h;
  std::string error;
  int exit_code = kExitOk;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  int exit_code = kExitOk;  ///< worst point exit code
};

/// One solve plus classification per (p, alpha, beta) point; failures are
/// recorded and the sweep continues. Writes `out_dir`/sweep.csv. Throws
/// ConfigError before running anything when the point count exceeds the budget.
SweepReport run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  double value = 0;
  double threshold = 0;
  double seconds = 0;
};

struct SelfTestOptions {
  std::vector<double> alphas{0.5, 1.0, 1.5};
  /// Poison the mass-ledger run after its first step; the run then raises NumericalError.
  bool inject_nan = false;
};

/// Fast checks: kernel mass, semigroup, Cauchy closed form, scaling identity,
/// mass ledger. Throws ConfigError for alphas outside (0, 2).
std::vector<SelfTestCheck> selftest(const SelfTestOptions& opts = {});
std::string to_json(const std::vector<SelfTestCheck>& checks);

/// Writes a 17-significant-digit CSV.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace mlheat
