#include "mlheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "mlheat/kernels.hpp"
#include "mlheat/parallel.hpp"
#include "mlheat/quadrature.hpp"
#include "mlheat/spectral.hpp"

namespace mlheat {

// ---- AbsorptionSchedule ----------------------------------------------------

AbsorptionSchedule AbsorptionSchedule::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("constant absorption coefficient must be positive");
  AbsorptionSchedule s;
  s.kind_ = Kind::constant;
  s.c_ = c;
  return s;
}

AbsorptionSchedule AbsorptionSchedule::power(double c, double sigma) {
  if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(sigma)) {
    throw ConfigError("power absorption needs c > 0 and finite sigma");
  }
  AbsorptionSchedule s;
  s.kind_ = Kind::power;
  s.c_ = c;
  s.sigma_ = sigma;
  return s;
}

AbsorptionSchedule AbsorptionSchedule::table(std::vector<double> t, std::vector<double> h) {
  if (t.empty() || t.size() != h.size()) throw ConfigError("absorption table needs matching, nonempty t and h");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i]) || !std::isfinite(t[i])) {
      throw ConfigError("absorption table values must be positive and finite");
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw ConfigError("absorption table times must increase strictly");
  }
  AbsorptionSchedule s;
  s.kind_ = Kind::table;
  s.t_ = std::move(t);
  s.h_ = std::move(h);
  return s;
}

double AbsorptionSchedule::operator()(double t) const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::power:
      return c_ * std::pow(1.0 + t, sigma_);
    case Kind::table: {
      if (t <= t_.front()) return h_.front();
      if (t >= t_.back()) return h_.back();
      const auto hi = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
      return (1.0 - w) * h_[lo] + w * h_[hi];
    }
  }
  return c_;
}

double AbsorptionSchedule::integral(double t0, double t1) const {
  if (!(t1 >= t0) || t0 < 0.0) throw ConfigError("absorption integral needs 0 <= t0 <= t1");
  if (t1 == t0) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return c_ * (t1 - t0);
    case Kind::power: {
      // Written with log1p/expm1 so short intervals keep full precision.
      const double base = 1.0 + t0;
      const double l = std::log1p((t1 - t0) / base);
      const double e = sigma_ + 1.0;
      if (e == 0.0) return c_ * l;
      return c_ * std::pow(base, e) * std::expm1(e * l) / e;
    }
    case Kind::table: {
      std::vector<double> breaks{t0};
      for (double k : t_) {
        if (k > t0 && k < t1) breaks.push_back(k);
      }
      breaks.push_back(t1);
      return quad::adaptive_simpson([this](double s) { return (*this)(s); }, breaks, 1e-10);
    }
  }
  return 0.0;
}

double AbsorptionSchedule::inf(double t0, double t1) const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::power:
      if (sigma_ >= 0.0) return (*this)(t0);
      return std::isinf(t1) ? 0.0 : (*this)(t1);
    case Kind::table: {
      double m = std::min((*this)(t0), std::isinf(t1) ? h_.back() : (*this)(t1));
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i] > t0 && t_[i] < t1) m = std::min(m, h_[i]);
      }
      return m;
    }
  }
  return c_;
}

// ---- time map and schedules -------------------------------------------------

double tau_of(double t, double beta) {
  if (!(t >= 0.0) || !(beta >= 0.0)) throw ConfigError("tau needs t >= 0 and beta >= 0");
  if (beta == 0.0) return t;
  return std::pow(t, beta + 1.0) / (beta + 1.0);
}

double t_of(double tau, double beta) {
  if (!(tau >= 0.0) || !(beta >= 0.0)) throw ConfigError("inverse tau needs tau >= 0 and beta >= 0");
  if (beta == 0.0) return tau;
  return std::pow((beta + 1.0) * tau, 1.0 / (beta + 1.0));
}

void ProblemSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("alpha must lie in (0, 2)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must exceed 1");
  if (!u0.finite()) throw ConfigError("initial data must be finite");
  if (u0.min() < 0.0) throw ConfigError("initial data must be nonnegative");
}

StepSchedule StepSchedule::uniform(double tau_end, std::size_t steps, std::size_t snapshot_every) {
  if (!(tau_end > 0.0) || steps == 0) throw ConfigError("uniform schedule needs tau_end > 0 and steps > 0");
  StepSchedule s;
  for (std::size_t k = 1; k <= steps; ++k) {
    s.taus_.push_back(k == steps ? tau_end : tau_end * static_cast<double>(k) / static_cast<double>(steps));
    s.snap_.push_back(k == steps || (snapshot_every > 0 && k % snapshot_every == 0));
  }
  return s;
}

StepSchedule StepSchedule::with_snapshots(std::span<const double> snapshot_t, double beta, double max_dtau) {
  if (!(max_dtau > 0.0)) throw ConfigError("max_dtau must be positive");
  StepSchedule s;
  for (double t : snapshot_t) {
    const double target = tau_of(t, beta);
    const double from = s.taus_.back();
    if (target == from && target == 0.0) continue;
    if (!(target > from)) throw ConfigError("snapshot times must increase strictly");
    const auto n = static_cast<std::size_t>(std::ceil((target - from) / max_dtau * (1.0 - 1e-12)));
    const std::size_t m = std::max<std::size_t>(n, 1);
    for (std::size_t k = 1; k <= m; ++k) {
      s.taus_.push_back(k == m ? target : from + (target - from) * static_cast<double>(k) / static_cast<double>(m));
      s.snap_.push_back(k == m);
    }
  }
  if (s.taus_.size() < 2) throw ConfigError("schedule needs at least one positive snapshot time");
  return s;
}

std::vector<double> geometric_times(double t_min, double t_max, double rho) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !(rho > 1.0)) {
    throw ConfigError("geometric times need 0 < t_min <= t_max and rho > 1");
  }
  std::vector<double> out;
  for (int j = 0;; ++j) {
    const double t = t_min * std::pow(rho, j);
    if (t > t_max * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  if (out.back() < t_max * (1.0 - 1e-12)) out.push_back(t_max);
  return out;
}

// ---- steps -------------------------------------------------------------------

namespace {

void clip_and_log(Field& f, ClipLog* log) {
  const double lo = f.min();
  if (!(lo < 0.0)) return;
  const double hi = f.max();
  const double clipped = par::clip_negative(f.values()) * f.grid().cell_volume();
  if (log) {
    log->clipped_mass += clipped;
    log->worst_ripple = std::max(log->worst_ripple, hi > 0.0 ? -lo / hi : INFINITY);
  }
}

void check_absorption_input(const Field& f) {
  const double lo = f.min();
  if (lo < 0.0 && lo < -1e-10 * std::max(f.max(), 0.0)) {
    throw ContractViolation("absorption step received negative values beyond the clip tolerance");
  }
}

// One run's state: the iterate, the cumulative absorbed mass, and cached
// linear propagators keyed by step length.
class Stepper {
 public:
  Stepper(const ProblemSpec& problem, Field u, bool dealias = false)
      : pb_(problem), sym_(SpectralSymbol::mixed(problem.alpha)), u_(std::move(u)), scratch_(u_.grid()) {
    if (dealias) {
      const GridSpec& g = u_.grid();
      const double cut = std::numbers::pi * static_cast<double>(g.points()) / (3.0 * g.half_width());
      mask_ = mode_table(g, [cut](double xi) { return xi <= cut ? 1.0 : 0.0; });
    }
  }

  void step(double tau_a, double tau_b) {
    const double ta = t_of(tau_a, pb_.beta);
    const double tm = t_of(0.5 * (tau_a + tau_b), pb_.beta);
    const double tb = t_of(tau_b, pb_.beta);
    absorb(ta, tm);
    u_ = propagator(tau_b - tau_a).apply(u_);
    if (!mask_.empty()) u_ = apply_mode_factors(u_, mask_);
    clip_and_log(u_, &clip_);
    absorb(tm, tb);
  }

  Field& u() { return u_; }
  const Field& u() const { return u_; }
  double absorbed() const { return absorbed_; }
  const ClipLog& clip() const { return clip_; }

 private:
  void absorb(double t0, double t1) {
    check_absorption_input(u_);
    const double H = pb_.schedule.integral(t0, t1);
    par::absorb(u_.values(), scratch_.values(), H, pb_.p);
    const auto a = u_.values();
    const auto b = scratch_.values();
    absorbed_ += u_.grid().cell_volume() * par::sum(a.size(), [&](std::size_t i) {
      return std::max(a[i], 0.0) - b[i];
    });
    std::swap(u_, scratch_);
  }

  const SemigroupPropagator& propagator(double dtau) {
    auto it = cache_.find(dtau);
    if (it == cache_.end()) {
      if (cache_.size() > 64) cache_.clear();
      it = cache_.emplace(dtau, SemigroupPropagator(u_.grid(), sym_, dtau)).first;
    }
    return it->second;
  }

  const ProblemSpec& pb_;
  SpectralSymbol sym_;
  Field u_;
  Field scratch_;
  double absorbed_ = 0.0;
  ClipLog clip_;
  std::map<double, SemigroupPropagator> cache_;
  std::vector<double> mask_;
};

TraceEntry make_entry(double t, double tau, const Field& u, double absorbed) {
  return {t, tau, u.integral(), absorbed, par::max_abs(u.values()), lq_norm(u, 2.0)};
}

}  // namespace

Field linear_step(const Field& f, double dtau, double alpha, ClipLog* log) {
  if (!(dtau >= 0.0)) throw ConfigError("linear step needs dtau >= 0");
  Field out = apply_symbol(f, SpectralSymbol::mixed(alpha), dtau, SymbolMode::semigroup);
  clip_and_log(out, log);
  return out;
}

Field absorption_step(const Field& f, double t0, double t1, double p, const AbsorptionSchedule& h) {
  if (!(t1 >= t0)) throw ConfigError("absorption step needs t1 >= t0");
  if (!(p > 1.0)) throw ConfigError("p must exceed 1");
  check_absorption_input(f);
  Field out(f.grid());
  par::absorb(f.values(), out.values(), h.integral(t0, t1), p);
  return out;
}

SolveResult solve(const ProblemSpec& problem, const StepSchedule& steps, const SolveOptions& options) {
  problem.validate();
  Stepper run(problem, problem.u0, options.dealias);
  SolveResult res;
  const auto& taus = steps.taus();
  res.trace.entries.push_back(make_entry(0.0, 0.0, problem.u0, 0.0));
  res.snapshots.push_back({0.0, 0.0, options.keep_fields ? problem.u0 : Field()});
  Snapshot last_good{0.0, 0.0, problem.u0};

  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    run.step(taus[k], taus[k + 1]);
    if (options.after_step) options.after_step(k, run.u());
    const double tau = taus[k + 1];
    const double t = t_of(tau, problem.beta);
    if (!run.u().finite()) {
      std::string where;
      if (!options.failure_dir.empty()) {
        std::filesystem::create_directories(options.failure_dir);
        const auto path = options.failure_dir / "last_good.fhk";
        write_snapshot(path, last_good.u);
        where = "; last good state (t = " + std::to_string(last_good.t) + ") written to " + path.string();
      }
      throw SolveFailure("non-finite iterate at step " + std::to_string(k + 1) + where, last_good);
    }
    if (steps.is_snapshot(k + 1)) {
      res.trace.entries.push_back(make_entry(t, tau, run.u(), run.absorbed()));
      res.snapshots.push_back({t, tau, options.keep_fields ? run.u() : Field()});
      last_good = {t, tau, run.u()};
    }
  }
  res.final_field = run.u();
  res.clip = run.clip();
  return res;
}

double duhamel_residual(const ProblemSpec& problem, std::span<const Snapshot> snaps, std::size_t i0, std::size_t i1) {
  if (snaps.size() < 3) throw ConfigError("Duhamel residual needs at least 3 snapshots");
  if (i0 > i1 || i1 >= snaps.size()) throw ConfigError("snapshot indices out of order or range");
  if (i0 == i1) return 0.0;
  const auto sym = SpectralSymbol::mixed(problem.alpha);
  const Snapshot& end = snaps[i1];
  Field r = end.u;
  r -= apply_symbol(snaps[i0].u, sym, end.tau - snaps[i0].tau, SymbolMode::semigroup);
  // Trapezoid in s of h(s) E(tau_end - tau(s)) * u(s)^p.
  auto integrand = [&](const Snapshot& s) {
    Field up(s.u.grid());
    const auto in = s.u.values();
    auto out = up.values();
    const double h = problem.schedule(s.t);
    par::for_each(in.size(), [&](std::size_t i) { out[i] = h * std::pow(std::max(in[i], 0.0), problem.p); });
    return apply_symbol(up, sym, end.tau - s.tau, SymbolMode::semigroup);
  };
  Field prev = integrand(snaps[i0]);
  for (std::size_t j = i0 + 1; j <= i1; ++j) {
    Field cur = integrand(snaps[j]);
    const double w = 0.5 * (snaps[j].t - snaps[j - 1].t);
    r += w * prev;
    r += w * cur;
    prev = std::move(cur);
  }
  const double norm = lq_norm(end.u, 1.0);
  return norm > 0.0 ? lq_norm(r, 1.0) / norm : lq_norm(r, 1.0);
}

ComparisonResult comparison_check(const ProblemSpec& problem, const Field& v0, const StepSchedule& steps) {
  problem.validate();
  if (!(v0.grid() == problem.u0.grid())) throw ConfigError("comparison data live on different grids");
  for (std::size_t i = 0; i < v0.size(); ++i) {
    if (!(v0[i] >= problem.u0[i])) throw ConfigError("comparison needs u0 <= v0 pointwise");
  }
  Stepper u(problem, problem.u0);
  Stepper v(problem, v0);
  ComparisonResult res;
  auto observe = [&] {
    const auto a = u.u().values();
    const auto b = v.u().values();
    double gap = INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::min(gap, b[i] - a[i]);
    res.min_gap = std::min(res.min_gap, gap);
    res.max_v = std::max(res.max_v, v.u().max());
  };
  res.min_gap = INFINITY;
  observe();
  const auto& taus = steps.taus();
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    u.step(taus[k], taus[k + 1]);
    v.step(taus[k], taus[k + 1]);
    observe();
  }
  return res;
}

SelfConvergence self_convergence(const ProblemSpec& problem, double tau_end, std::size_t base_steps) {
  SelfConvergence out;
  std::vector<Field> finals;
  SolveOptions opts;
  opts.keep_fields = false;
  for (std::size_t m = 1; m <= 4; m *= 2) {
    out.steps.push_back(base_steps * m);
    finals.push_back(solve(problem, StepSchedule::uniform(tau_end, base_steps * m), opts).final_field);
  }
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) out.differences.push_back(lq_norm(finals[i] - finals[i + 1], 2.0));
  out.ratio = out.differences[0] / out.differences[1];
  return out;
}

}  // namespace mlheat
