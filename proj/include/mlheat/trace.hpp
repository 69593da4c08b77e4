#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace mlheat {

struct TraceEntry {
  double t = 0;
  double tau = 0;
  double mass = 0;
  double absorbed = 0;  ///< cumulative absorbed mass up to t
  double linf = 0;
  double l2 = 0;
};

struct MassTrace {
  std::vector<TraceEntry> entries;
  std::optional<double> M_inf_estimate;

  double initial_mass() const { return entries.empty() ? 0.0 : entries.front().mass; }
  /// max_k |M(t_k) - M(0) + A(t_k)|
  double ledger_residual() const;
  /// max_k (M(t_{k+1}) - M(t_k)), the largest mass increase (<= 0 for a monotone trace)
  double worst_mass_increase() const;
};

/// CSV with header t,tau,mass,absorbed,linf,l2 and 17 significant digits.
void write_trace_csv(const std::filesystem::path& path, const MassTrace& trace);
MassTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace mlheat
