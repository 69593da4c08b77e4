// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mlheat/errors.hpp"
#include "mlheat/fractional.hpp"
#include "mlheat/harness.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/observers.hpp"
#include "mlheat/reference.hpp"
#include "mlheat/solver.hpp"
#include "mlheat/spectral.hpp"

using namespace mlheat;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("raised: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("%s %02d %-22s %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Every solver run made here is also checked against the mass ledger.
struct LedgerRecord {
  std::string run;
  MassTrace trace;
  double clipped = 0;
};
std::vector<LedgerRecord> ledger_runs;

SolveResult recorded_solve(const std::string& name, const ProblemSpec& pb, const StepSchedule& steps,
                           const SolveOptions& opts = {}) {
  SolveResult res = solve(pb, steps, opts);
  ledger_runs.push_back({name, res.trace, res.clip.clipped_mass});
  return res;
}

// Small nonlinear run shared by several criteria: L = 32, n = 512, alpha = 1,
// p = 2, h = 1, u0 = 2 exp(-x^2), T = 1.
ProblemSpec reference_problem() {
  ProblemSpec pb;
  pb.alpha = 1.0;
  pb.beta = 0.0;
  pb.p = 2.0;
  pb.schedule = AbsorptionSchedule::constant(1.0);
  pb.u0 = Field::sample(GridSpec::make(1, 32.0, 512), [](const Point& x) { return 2.0 * std::exp(-x[0] * x[0]); });
  return pb;
}

// (1/pi) int_0^inf exp(-t xi) cos(x xi) d xi by Gauss-Kronrod on [0, 40/t].
double cauchy_by_quadrature(double x, double t) {
  using boost::math::quadrature::gauss_kronrod;
  const double upper = 40.0 / t;
  const int panels = std::max(1, static_cast<int>(std::ceil(upper * std::max(std::abs(x), 1.0) / pi)));
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = upper * k / panels;
    const double b = upper * (k + 1) / panels;
    sum += gauss_kronrod<double, 61>::integrate([&](double xi) { return std::exp(-t * xi) * std::cos(x * xi); }, a, b,
                                                10, 1e-15);
  }
  return sum / pi;
}

}  // namespace

int main() {
  const std::vector<double> alphas{0.5, 1.0, 1.5};

  criterion(1, "kernel_mass", [&] {
    double worst = 0.0, worst_tail = 0.0;
    for (double a : alphas) {
      const GridSpec g = resolving_grid(1, a, 0.1, 10.0, 1e-6, std::size_t{1} << 24);
      for (double t : {0.1, 1.0, 10.0}) {
        worst = std::max(worst, std::abs(mixed_kernel(g, a, t).integral() - 1.0));
        worst_tail = std::max(worst_tail, stable_tail_mass(1, a, t, g.half_width()));
      }
    }
    return Outcome{worst <= 1e-6, "max|mass-1|=" + fmt("%.2e", worst) + " <= 1e-6 (continuum tail beyond box " +
                                      fmt("%.1e", worst_tail) + ")"};
  });

  criterion(2, "semigroup", [&] {
    const GridSpec g = GridSpec::make(1, 256.0, 4096);
    double worst = 0.0;
    for (double a : alphas) {
      const Field e1 = mixed_kernel(g, a, 1.0);
      const Field e2 = mixed_kernel(g, a, 2.0);
      worst = std::max(worst, lq_norm(reference::direct_convolution(e1, e1) - e2, 1.0));
    }
    return Outcome{worst <= 1e-6, "L1=" + fmt("%.2e", worst) + " <= 1e-6"};
  });

  criterion(3, "cauchy_closed_form", [&] {
    const GridSpec g = GridSpec::make(1, 16384.0, std::size_t{1} << 19);
    double worst = 0.0, oracle_gap = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const Field k = stable_kernel(g, 1.0, t);
      for (std::size_t j = 0; j < g.points(); ++j) {
        const double x = g.coordinate(j);
        if (std::abs(x) > 10.0) continue;
        const double exact = t / (pi * (t * t + x * x));
        worst = std::max(worst, std::abs(k[j] - exact) / exact);
      }
      for (double x = 0.0; x <= 10.0; x += 0.5) {
        const double exact = t / (pi * (t * t + x * x));
        oracle_gap = std::max(oracle_gap, std::abs(cauchy_by_quadrature(x, t) - exact) / exact);
      }
    }
    return Outcome{worst <= 1e-6 && oracle_gap <= 1e-10,
                   "max rel=" + fmt("%.2e", worst) + " <= 1e-6 (closed form vs quadrature " + fmt("%.1e", oracle_gap) +
                       ")"};
  });

  criterion(4, "two_branch_decay", [&] {
    bool ok = true;
    std::string detail;
    for (double a : alphas) {
      const GridSpec big = resolving_grid(1, a, 1e2, 1e3, 1e-4, std::size_t{1} << 24);
      const GridSpec small = resolving_grid(1, a, 1e-3, 1e-2, 1e-4, std::size_t{1} << 24);
      const double s_big = kernel_decay_fit(big, a, kInfNorm, 1e2, 1e3).slope;
      const double s_small = kernel_decay_fit(small, a, kInfNorm, 1e-3, 1e-2).slope;
      const bool ok_big = std::abs(s_big / (-1.0 / a) - 1.0) <= 0.05;
      const bool ok_small = std::abs(s_small / -0.5 - 1.0) <= 0.05;
      ok = ok && ok_big && ok_small;
      detail += "a=" + fmt("%.1f", a) + ": large " + fmt("%.4f", s_big) + (ok_big ? "" : "!") + " vs " +
                fmt("%.4f", -1.0 / a) + ", small " + fmt("%.4f", s_small) + (ok_small ? "" : "!") + " vs -0.5; ";
    }
    return Outcome{ok, detail + "tol 5%"};
  });

  criterion(5, "scaling", [&] {
    double spectral = 0.0, quadrature = 0.0;
    const GridSpec base = GridSpec::make(1, 32.0, 1024);
    for (double R : {2.0, 4.0}) {
      for (double s : {0.25, 0.5, 0.75}) {
        const Field f = Field::sample(base, [](const Point& x) { return std::exp(-x[0] * x[0] / 2.0); });
        const Field fR =
            Field::sample(base.dilated(R), [&](const Point& x) { return std::exp(-x[0] * x[0] / (2.0 * R * R)); });
        const Field a = frac_laplacian_spectral(fR, 2.0 * s);
        const Field b = frac_laplacian_spectral(f, 2.0 * s);
        const double peak = std::max(std::abs(a.max()), std::abs(a.min()));
        for (std::size_t j = 0; j < a.size(); ++j) {
          spectral = std::max(spectral, std::abs(a[j] - std::pow(R, -2.0 * s) * b[j]) / peak);
        }
        // The dilated profile keeps the unit feature hint, so the two sides
        // are integrated with different breakpoints.
        const Profile g = Profile::gaussian(1, 1.0);
        Profile gR = g;
        gR.value = [R](const Point& x) { return std::exp(-x[0] * x[0] / (2.0 * R * R)); };
        for (double x : {0.0, 0.7, 3.1, 9.0}) {
          const double lhs = frac_laplacian_pointwise(gR, s, {x, 0.0});
          const double rhs = std::pow(R, -2.0 * s) * frac_laplacian_pointwise(g, s, {x / R, 0.0});
          quadrature = std::max(quadrature, std::abs(lhs - rhs) / std::abs(rhs));
        }
      }
    }
    return Outcome{spectral <= 1e-10 && quadrature <= 1e-5, "spectral " + fmt("%.2e", spectral) +
                                                                 " <= 1e-10, quadrature " + fmt("%.2e", quadrature) +
                                                                 " <= 1e-5"};
  });

  criterion(6, "far_field_rate", [&] {
    const Profile phi = Profile::bracket(1, 1.0, 2.0);
    std::vector<double> xs, ys;
    for (int i = 0; i <= 12; ++i) {
      const double x = 5.0 * std::pow(20.0, i / 12.0);
      xs.push_back(x);
      ys.push_back(std::abs(frac_laplacian_pointwise(phi, 0.5, {x, 0.0})));
    }
    const double slope = loglog_slope(xs, ys);
    return Outcome{std::abs(slope + 2.0) <= 0.1, "slope " + fmt("%.4f", slope) + " vs -2 +- 0.1"};
  });

  criterion(7, "capacity_slope", [&] {
    const auto spec = TestFunctionSpec::make(1, 1.0, 2.0, 1.5, 1.0, 8.0);
    std::vector<double> Rs, Is;
    for (double R = 8.0; R <= 128.0; R *= 2.0) {
      const auto sR = spec.with_R(R);
      Rs.push_back(R);
      Is.push_back(capacity_integral(sR, capacity_grid(sR, 0.5)));
    }
    const double slope = loglog_slope(Rs, Is);
    return Outcome{std::abs(slope + 1.0) <= 0.1, "slope " + fmt("%.4f", slope) + " vs -1 +- 0.1"};
  });

  criterion(8, "splitting_order", [&] {
    const ProblemSpec pb = reference_problem();
    const auto sc = self_convergence(pb, 1.0, 10);
    SolveOptions opts;
    opts.keep_fields = false;
    for (std::size_t n : sc.steps) recorded_solve("reference/" + std::to_string(n), pb, StepSchedule::uniform(1.0, n, 1), opts);
    return Outcome{sc.ratio >= 3.5 && sc.ratio <= 4.5, "ratio " + fmt("%.4f", sc.ratio) + " in [3.5, 4.5]"};
  });

  criterion(10, "comparison", [&] {
    const ProblemSpec pb = reference_problem();
    const Field v0 = 2.0 * pb.u0;
    const auto steps = StepSchedule::uniform(1.0, 40, 1);
    const auto cmp = comparison_check(pb, v0, steps);
    ProblemSpec pv = pb;
    pv.u0 = v0;
    SolveOptions opts;
    opts.keep_fields = false;
    recorded_solve("comparison/u", pb, steps, opts);
    recorded_solve("comparison/v", pv, steps, opts);
    return Outcome{cmp.min_gap >= -1e-10 * cmp.max_v, "min(v-u) " + fmt("%.3e", cmp.min_gap) + " >= -1e-10 max v"};
  });

  // Long runs shared by the dichotomy and profile criteria.
  const ExperimentConfig dich = ExperimentConfig::from(Config{});
  SolveResult run_p3, run_p12;
  bool have_runs = false;
  criterion(11, "dichotomy", [&] {
    run_p3 = recorded_solve("dichotomy/p=3", make_problem(dich, 1.0, 0.0, 3.0), make_steps(dich, 0.0));
    run_p12 = recorded_solve("dichotomy/p=1.2", make_problem(dich, 1.0, 0.0, 1.2), make_steps(dich, 0.0));
    have_runs = true;
    const auto c3 = classify_mass_limit(run_p3.trace, dich.window_decades);
    const auto c12 = classify_mass_limit(run_p12.trace, dich.window_decades);
    const double m0 = run_p3.trace.initial_mass();
    const double mT = run_p12.trace.entries.back().mass / run_p12.trace.initial_mass();
    const bool ok3 = c3.verdict == MassLimit::positive_plateau && c3.M_inf_estimate >= 0.5 * m0;
    const bool ok12 = c12.verdict == MassLimit::decaying_to_zero && mT <= 0.3 && c12.slope < -0.05;
    return Outcome{ok3 && ok12, "p=3 " + to_string(c3.verdict) + " M_inf/M0=" + fmt("%.5f", c3.M_inf_estimate / m0) +
                                    "; p=1.2 " + to_string(c12.verdict) + " M(T)/M0=" + fmt("%.3e", mT) +
                                    " slope=" + fmt("%.3f", c12.slope)};
  });

  criterion(12, "profile_convergence", [&] {
    if (!have_runs) return Outcome{false, "dichotomy runs unavailable"};
    const auto cls = classify_mass_limit(run_p3.trace, dich.window_decades);
    const double t_end = run_p3.snapshots.back().t;
    std::vector<double> errs;
    for (const auto& s : run_p3.snapshots) {
      if (s.t >= t_end / 10.0 * (1.0 - 1e-12)) errs.push_back(profile_error(s.u, cls.M_inf_estimate, s.t, 1.0, 0.0, 2.0));
    }
    bool ok = errs.size() >= 2;
    double worst_rise = -INFINITY;
    for (std::size_t i = 1; i < errs.size(); ++i) {
      worst_rise = std::max(worst_rise, errs[i] - errs[i - 1]);
      if (errs[i] > errs[i - 1]) ok = false;
    }
    return Outcome{ok, std::to_string(errs.size()) + " snapshots, " + fmt("%.4e", errs.front()) + " -> " +
                           fmt("%.4e", errs.back()) + ", largest step change " + fmt("%.2e", worst_rise)};
  });

  criterion(13, "taylor_contraction", [&] {
    const GridSpec g = GridSpec::make(1, 8192.0, 65536);
    const Field gauss = Field::sample(g, [](const Point& x) {
      return std::exp(-0.5 * (x[0] - 1.0) * (x[0] - 1.0)) / std::sqrt(2.0 * pi);
    });
    std::vector<double> ts;
    for (int i = 0; i < 5; ++i) ts.push_back(10.0 * std::pow(10.0, i / 4.0));
    const auto tc = taylor_contraction_error(gauss, 1.0, ts);
    const double slope = loglog_slope(ts, tc.errors);
    return Outcome{slope <= -0.9, "slope " + fmt("%.4f", slope) + " <= -0.9"};
  });

  criterion(14, "duhamel_residual", [&] {
    const ProblemSpec pb = reference_problem();
    const auto res = recorded_solve("duhamel", pb, StepSchedule::uniform(1.0, 2000, 25));
    std::vector<Snapshot> coarse;
    for (std::size_t i = 0; i < res.snapshots.size(); i += 2) coarse.push_back(res.snapshots[i]);
    const double fine_r = duhamel_residual(pb, res.snapshots, 0, res.snapshots.size() - 1);
    const double coarse_r = duhamel_residual(pb, coarse, 0, coarse.size() - 1);
    return Outcome{fine_r <= 1e-3 && fine_r <= 0.5 * coarse_r,
                   "dense " + fmt("%.3e", fine_r) + " <= 1e-3, coarse " + fmt("%.3e", coarse_r) + " (ratio " +
                       fmt("%.2f", coarse_r / fine_r) + " >= 2)"};
  });

  criterion(9, "mass_ledger", [&] {
    if (ledger_runs.empty()) return Outcome{false, "no runs recorded"};
    bool ok = true;
    double worst_ledger = 0.0, worst_rise = -INFINITY;
    std::string bad;
    for (const auto& r : ledger_runs) {
      const double m0 = r.trace.initial_mass();
      const double led = r.trace.ledger_residual() / m0;
      const double rise = r.trace.worst_mass_increase() / m0;
      worst_ledger = std::max(worst_ledger, led);
      worst_rise = std::max(worst_rise, rise);
      if (led > 1e-6 || rise > 1e-12) {
        ok = false;
        bad += " " + r.run;
      }
    }
    return Outcome{ok, std::to_string(ledger_runs.size()) + " runs, ledger/M0 " + fmt("%.2e", worst_ledger) +
                           " <= 1e-6, max rise/M0 " + fmt("%.2e", worst_rise) + " <= 1e-12" +
                           (bad.empty() ? "" : "; failing:" + bad)};
  });

  criterion(15, "condition_h", [&] {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int cases = 0, agree = 0, convergent = 0;
    std::string bad;
    while (cases < 20) {
      const double p = 1.1 + 2.9 * u(rng);
      const double sigma = -3.0 + 6.0 * u(rng);
      const double beta = 2.0 * u(rng);
      const double alpha = 0.2 + 1.7 * u(rng);
      const int dim = u(rng) < 0.5 ? 1 : 2;
      const double k = dim * (p - 1.0) * (1.0 + beta) / alpha;
      // keep clear of the borderline, where a finite-range integral cannot decide
      if (std::abs(sigma - k + 1.0) < 0.15) continue;
      const auto h = AbsorptionSchedule::power(1.0, sigma);
      const auto closed = condition_h_check(p, alpha, beta, dim, h).verdict;
      const auto numeric = condition_h_numeric(p, alpha, beta, dim, h);
      ++cases;
      convergent += closed == Convergence::convergent;
      if (closed == numeric) {
        ++agree;
      } else {
        bad += " (p=" + fmt("%.3f", p) + ",sigma=" + fmt("%.3f", sigma) + ")";
      }
    }
    return Outcome{agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " agree (" +
                                       std::to_string(convergent) + " convergent)" + bad};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
