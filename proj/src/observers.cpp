#include "mlheat/observers.hpp"

#include <algorithm>
#include <cmath>

#include "mlheat/errors.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/quadrature.hpp"

namespace mlheat {

double critical_exponent(double alpha, double beta, int dim) {
  if (!(alpha > 0.0 && alpha < 2.0) || !(beta >= 0.0) || dim < 1) {
    throw ConfigError("critical exponent needs alpha in (0, 2), beta >= 0, N >= 1");
  }
  return 1.0 + alpha / (dim * (beta + 1.0));
}

std::string to_string(MassLimit m) {
  switch (m) {
    case MassLimit::positive_plateau:
      return "positive_plateau";
    case MassLimit::decaying_to_zero:
      return "decaying_to_zero";
    case MassLimit::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(Convergence c) { return c == Convergence::convergent ? "convergent" : "divergent"; }

namespace {

double weight_exponent(double p, double alpha, double beta, int dim) {
  if (!(p > 1.0) || !(alpha > 0.0 && alpha < 2.0) || !(beta >= 0.0) || dim < 1) {
    throw ConfigError("condition check needs p > 1, alpha in (0, 2), beta >= 0, N >= 1");
  }
  return dim * (p - 1.0) * (1.0 + beta) / alpha;
}

}  // namespace

Convergence condition_h_numeric(double p, double alpha, double beta, int dim, const AbsorptionSchedule& h,
                                double t_max) {
  const double k = weight_exponent(p, alpha, beta, dim);
  if (!(t_max >= 1e3)) throw ConfigError("numeric condition check needs t_max >= 1e3");
  // Substituting t = e^y makes every decade the same length.
  auto decade = [&](double lo, double hi) {
    return quad::gauss_kronrod([&](double y) {
             const double t = std::exp(y);
             return t * std::pow(t, -k) * h(t);
           },
                               std::log(lo), std::log(hi), 1e-10)
        .value;
  };
  const double last = decade(t_max / 10.0, t_max);
  const double before = decade(t_max / 100.0, t_max / 10.0);
  return last < 0.9 * before ? Convergence::convergent : Convergence::divergent;
}

ConditionH condition_h_check(double p, double alpha, double beta, int dim, const AbsorptionSchedule& h) {
  const double k = weight_exponent(p, alpha, beta, dim);
  ConditionH out;
  switch (h.kind()) {
    case AbsorptionSchedule::Kind::constant:
      out.verdict = -k < -1.0 ? Convergence::convergent : Convergence::divergent;
      break;
    case AbsorptionSchedule::Kind::power:
      out.verdict = h.sigma() - k < -1.0 ? Convergence::convergent : Convergence::divergent;
      break;
    case AbsorptionSchedule::Kind::table:
      out.verdict = condition_h_numeric(p, alpha, beta, dim, h);
      out.numeric = true;
      out.warning = "table schedule: decided by numeric integration over [1, 1e6], not in closed form";
      break;
  }
  return out;
}

MassClassification classify_mass_limit(const MassTrace& trace, double window_decades, const ClassifierThresholds& th) {
  if (!(window_decades > 0.0)) throw ConfigError("classification window must be positive");
  std::vector<const TraceEntry*> pos;
  for (const auto& e : trace.entries) {
    if (e.t > 0.0) pos.push_back(&e);
  }
  if (pos.size() < 3 || std::log10(pos.back()->t / pos.front()->t) < 2.0 - 1e-9) {
    throw ConfigError("mass trace must span at least 2 decades of t");
  }
  const double t_end = pos.back()->t;
  const double t_start = t_end * std::pow(10.0, -window_decades);
  std::vector<double> ts, ms;
  for (const auto* e : pos) {
    if (e->t >= t_start * (1.0 - 1e-12)) {
      ts.push_back(e->t);
      ms.push_back(e->mass);
    }
  }
  if (ts.size() < 2) throw ConfigError("classification window holds fewer than 2 samples");

  MassClassification out;
  const double m_end = ms.back();
  const double m_start = ms.front();
  if (m_end > 0.0) {
    out.slope = loglog_slope(ts, ms);
  } else {
    out.slope = -INFINITY;
  }
  out.relative_drop = m_start > 0.0 ? (m_start - m_end) / m_start : 0.0;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (ms[i] > ms[i - 1]) out.monotone = false;
  }
  if (std::abs(out.slope) < th.plateau_slope && out.relative_drop < th.plateau_drop) {
    out.verdict = MassLimit::positive_plateau;
  } else if (out.slope < th.decay_slope && out.monotone) {
    out.verdict = MassLimit::decaying_to_zero;
  }

  out.M_inf_estimate = m_end;
  if (out.verdict == MassLimit::positive_plateau) {
    // The absorbed integral has converged when its growth over the window is
    // small relative to its size.
    const TraceEntry& last = trace.entries.back();
    const TraceEntry* first_in_window = nullptr;
    for (const auto& e : trace.entries) {
      if (e.t >= t_start * (1.0 - 1e-12)) {
        first_in_window = &e;
        break;
      }
    }
    const double growth = last.absorbed - first_in_window->absorbed;
    if (last.absorbed > 0.0 && growth <= th.ledger_tail * last.absorbed) {
      out.M_inf_estimate = trace.initial_mass() - last.absorbed;
      out.from_ledger = true;
    } else if (last.absorbed == 0.0) {
      out.M_inf_estimate = trace.initial_mass();
      out.from_ledger = true;
    }
  }
  return out;
}

double profile_error(const Field& u, double M_inf, double t, double alpha, double beta, double q) {
  if (!(t > 0.0) || !(M_inf >= 0.0)) throw ConfigError("profile error needs t > 0 and M_inf >= 0");
  if (!(q >= 1.0) || std::isinf(q)) throw ConfigError("profile error needs q in [1, inf)");
  const int N = u.grid().dim();
  Field diff = u;
  diff -= M_inf * mixed_kernel(u.grid(), alpha, tau_of(t, beta));
  const double weight = std::pow(t, (N / alpha) * (1.0 - 1.0 / q) * (1.0 + beta));
  return weight * lq_norm(diff, q);
}

double h_bound_H(double t, double p, double alpha, double beta, int dim, double u0_l1, double u0_lp, double C) {
  if (!(t > 0.0)) throw ConfigError("H needs t > 0");
  const double a = C * std::pow(t, -dim * (beta + 1.0) * (p - 1.0) / 2.0) * std::pow(u0_l1, p);
  const double b = C * std::pow(t, -dim * (beta + 1.0) * (p - 1.0) / alpha) * std::pow(u0_l1, p);
  return std::min({a, b, std::pow(u0_lp, p)});
}

}  // namespace mlheat
