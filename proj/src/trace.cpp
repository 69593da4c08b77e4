#include "mlheat/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mlheat/errors.hpp"

namespace mlheat {

double MassTrace::ledger_residual() const {
  double worst = 0.0;
  const double m0 = initial_mass();
  for (const auto& e : entries) worst = std::max(worst, std::abs(e.mass - m0 + e.absorbed));
  return worst;
}

double MassTrace::worst_mass_increase() const {
  double worst = entries.size() < 2 ? 0.0 : -INFINITY;
  for (std::size_t k = 1; k < entries.size(); ++k) worst = std::max(worst, entries[k].mass - entries[k - 1].mass);
  return worst;
}

void write_trace_csv(const std::filesystem::path& path, const MassTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  out << "t,tau,mass,absorbed,linf,l2\n";
  for (const auto& e : trace.entries) {
    out << e.t << ',' << e.tau << ',' << e.mass << ',' << e.absorbed << ',' << e.linf << ',' << e.l2 << '\n';
  }
  if (!out) throw ConfigError("write failed for " + path.string());
}

MassTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,tau,mass,absorbed", 0) != 0) {
    throw ConfigError(path.string() + " is not a trace CSV");
  }
  MassTrace trace;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    TraceEntry e;
    if (!(fields >> e.t >> e.tau >> e.mass >> e.absorbed >> e.linf >> e.l2)) {
      throw ConfigError(path.string() + ": malformed row " + std::to_string(row));
    }
    if (!trace.entries.empty() && !(e.t > trace.entries.back().t)) {
      throw ConfigError(path.string() + ": t must be strictly increasing");
    }
    trace.entries.push_back(e);
  }
  return trace;
}

}  // namespace mlheat
