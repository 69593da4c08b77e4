#include "mlheat/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mlheat/errors.hpp"
#include "mlheat/fractional.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/spectral.hpp"

namespace mlheat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
    out << '\n';
  }
}

Field gaussian_density(const GridSpec& grid, double mass, double width, double shift) {
  const double norm = mass * std::pow(2.0 * std::numbers::pi * width * width, -0.5 * grid.dim());
  return Field::sample(grid, [&](const Point& x) {
    double r2 = (x[0] - shift) * (x[0] - shift);
    if (grid.dim() == 2) r2 += (x[1] - shift) * (x[1] - shift);
    return norm * std::exp(-r2 / (2.0 * width * width));
  });
}

AbsorptionSchedule make_schedule(const ExperimentConfig& cfg) {
  if (cfg.h_kind == "constant") return AbsorptionSchedule::constant(cfg.h_c);
  if (cfg.h_kind == "power") return AbsorptionSchedule::power(cfg.h_c, cfg.h_sigma);
  return AbsorptionSchedule::table(cfg.h_table_t, cfg.h_table_h);
}

ProblemSpec make_problem(const ExperimentConfig& cfg, double alpha, double beta, double p) {
  const GridSpec grid = GridSpec::make(cfg.dim, cfg.half_width, cfg.points);
  ProblemSpec pb{alpha, beta, p, make_schedule(cfg), gaussian_density(grid, cfg.u0_mass, cfg.u0_width, cfg.u0_shift)};
  pb.validate();
  return pb;
}

StepSchedule make_steps(const ExperimentConfig& cfg, double beta) {
  const auto times = geometric_times(cfg.snapshot_tmin, cfg.t_end, cfg.snapshot_rho);
  return StepSchedule::with_snapshots(times, beta, cfg.dtau);
}

SolveResult run_solve(const ExperimentConfig& cfg, double alpha, double beta, double p, const fs::path& dir) {
  const ProblemSpec pb = make_problem(cfg, alpha, beta, p);
  SolveOptions opts;
  opts.keep_fields = cfg.write_snapshots;
  opts.dealias = cfg.dealias;
  opts.failure_dir = dir / "failure";
  if (cfg.inject_nan_step >= 0) {
    const auto at = static_cast<std::size_t>(cfg.inject_nan_step);
    opts.after_step = [at](std::size_t k, Field& u) {
      if (k == at) u[u.origin_index()] = std::nan("");
    };
  }
  SolveResult res = solve(pb, make_steps(cfg, beta), opts);
  fs::create_directories(dir);
  write_trace_csv(dir / "trace.csv", res.trace);
  if (cfg.write_snapshots) {
    const fs::path sdir = dir / "snapshots";
    fs::create_directories(sdir);
    auto index = open_out(sdir / "index.csv");
    index << "index,t,tau,file\n";
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%05zu.fhk", i);
      write_snapshot(sdir / name, res.snapshots[i].u);
      index << i << ',' << fmt17(res.snapshots[i].t) << ',' << fmt17(res.snapshots[i].tau) << ',' << name << '\n';
    }
  }
  return res;
}

AnalysisReport analyze(const MassTrace& trace, const AnalyzeInputs& in) {
  AnalysisReport r;
  r.classification = classify_mass_limit(trace, in.window_decades);
  r.ledger_residual = trace.ledger_residual();
  r.worst_mass_increase = trace.worst_mass_increase();
  r.initial_mass = trace.initial_mass();
  const int dim = in.dim;
  if (in.alpha && in.beta) {
    r.critical_exponent = critical_exponent(*in.alpha, *in.beta, dim);
    if (in.p && in.schedule) r.condition_h = condition_h_check(*in.p, *in.alpha, *in.beta, dim, *in.schedule);
  }
  if (in.snapshot_dir) {
    if (!in.alpha || !in.beta) throw ConfigError("profile errors need alpha and beta");
    std::ifstream idx(*in.snapshot_dir / "index.csv");
    if (!idx) throw ConfigError("no index.csv in " + in.snapshot_dir->string());
    std::string line;
    std::getline(idx, line);
    const double t_end = trace.entries.back().t;
    const double t_start = t_end * std::pow(10.0, -in.window_decades);
    while (std::getline(idx, line)) {
      std::istringstream row(line);
      std::string idx_s, t_s, tau_s, file;
      std::getline(row, idx_s, ',');
      std::getline(row, t_s, ',');
      std::getline(row, tau_s, ',');
      std::getline(row, file, ',');
      const double t = std::stod(t_s);
      if (t <= 0.0 || t < t_start * (1.0 - 1e-12)) continue;
      const Field u = read_snapshot(*in.snapshot_dir / file);
      r.profile_errors.push_back({t, profile_error(u, r.classification.M_inf_estimate, t, *in.alpha, *in.beta, 2.0)});
    }
  }
  return r;
}

std::string to_json(const AnalysisReport& r) {
  const auto& c = r.classification;
  json j;
  j["classification"] = to_string(c.verdict);
  j["slope"] = c.slope;
  j["relative_drop"] = c.relative_drop;
  j["monotone"] = c.monotone;
  j["M_inf_estimate"] = c.M_inf_estimate;
  j["M_inf_from_ledger"] = c.from_ledger;
  j["initial_mass"] = r.initial_mass;
  j["ledger_residual"] = r.ledger_residual;
  j["worst_mass_increase"] = r.worst_mass_increase;
  if (r.critical_exponent) j["critical_exponent"] = *r.critical_exponent;
  if (r.condition_h) {
    j["condition_h"] = to_string(r.condition_h->verdict);
    if (!r.condition_h->warning.empty()) j["condition_h_warning"] = r.condition_h->warning;
  }
  json pe = json::array();
  for (const auto& p : r.profile_errors) pe.push_back({{"t", p.t}, {"value", p.value}});
  j["profile_errors"] = pe;
  return j.dump(2);
}

SweepReport run_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const std::size_t count = cfg.p.size() * cfg.alpha.size() * cfg.beta.size();
  if (count > cfg.sweep_budget) {
    throw ConfigError("sweep has " + std::to_string(count) + " points, above sweep_budget " +
                      std::to_string(cfg.sweep_budget));
  }
  SweepReport rep;
  std::size_t index = 0;
  for (double alpha : cfg.alpha) {
    for (double beta : cfg.beta) {
      for (double p : cfg.p) {
        SweepRow row{p, alpha, beta, "failed", 0.0, critical_exponent(alpha, beta, cfg.dim), "", "", kExitOk};
        char name[32];
        std::snprintf(name, sizeof name, "point_%04zu", index++);
        try {
          row.condition_h = to_string(condition_h_check(p, alpha, beta, cfg.dim, make_schedule(cfg)).verdict);
          const SolveResult res = run_solve(cfg, alpha, beta, p, out_dir / name);
          const auto cls = classify_mass_limit(res.trace, cfg.window_decades);
          row.classification = to_string(cls.verdict);
          row.M_inf_estimate = cls.M_inf_estimate;
        } catch (const ConfigError& e) {
          row.error = e.what();
          row.exit_code = kExitConfig;
        } catch (const NumericalError& e) {
          row.error = e.what();
          row.exit_code = kExitNumeric;
        }
        rep.exit_code = std::max(rep.exit_code, row.exit_code);
        rep.rows.push_back(std::move(row));
      }
    }
  }
  auto out = open_out(out_dir / "sweep.csv");
  out << "p,alpha,beta,classification,M_inf_estimate,critical_exponent,condition_h\n";
  for (const auto& r : rep.rows) {
    out << fmt17(r.p) << ',' << fmt17(r.alpha) << ',' << fmt17(r.beta) << ',' << r.classification << ','
        << fmt17(r.M_inf_estimate) << ',' << fmt17(r.critical_exponent) << ',' << r.condition_h << '\n';
  }
  if (rep.exit_code != kExitOk) {
    auto err = open_out(out_dir / "failures.txt");
    for (const auto& r : rep.rows) {
      if (r.exit_code != kExitOk) err << "p=" << fmt17(r.p) << " alpha=" << fmt17(r.alpha) << " beta=" << fmt17(r.beta) << ": " << r.error << '\n';
    }
  }
  return rep;
}

namespace {

SelfTestCheck timed(const std::string& name, double threshold, const std::function<double()>& measure) {
  const auto t0 = std::chrono::steady_clock::now();
  SelfTestCheck c{name, false, measure(), threshold, 0.0};
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.passed = std::isfinite(c.value) && c.value <= threshold;
  return c;
}

}  // namespace

std::vector<SelfTestCheck> selftest(const SelfTestOptions& opts) {
  for (double a : opts.alphas) {
    if (!(a > 0.0 && a < 2.0)) throw ConfigError("selftest alpha " + fmt17(a) + " outside (0, 2)");
  }
  std::vector<SelfTestCheck> out;
  const GridSpec g = GridSpec::make(1, 64.0, 4096);
  const auto& alphas = opts.alphas;

  out.push_back(timed("kernel_mass", 1e-6, [&] {
    double worst = 0.0;
    for (double a : alphas) worst = std::max(worst, std::abs(mixed_kernel(g, a, 1.0).integral() - 1.0));
    return worst;
  }));
  out.push_back(timed("semigroup", 1e-6, [&] {
    double worst = 0.0;
    for (double a : alphas) {
      const Field e1 = mixed_kernel(g, a, 1.0);
      worst = std::max(worst, lq_norm(convolve(e1, e1) - mixed_kernel(g, a, 2.0), 1.0));
    }
    return worst;
  }));
  out.push_back(timed("cauchy_closed_form", 1e-6, [] {
    const GridSpec gc = GridSpec::make(1, 16384.0, std::size_t{1} << 19);
    const Field k = stable_kernel(gc, 1.0, 1.0);
    double worst = 0.0;
    for (std::size_t j = 0; j < gc.points(); ++j) {
      const double x = gc.coordinate(j);
      if (std::abs(x) > 10.0) continue;
      const double exact = 1.0 / (std::numbers::pi * (1.0 + x * x));
      worst = std::max(worst, std::abs(k[j] - exact) / exact);
    }
    return worst;
  }));
  out.push_back(timed("scaling_spectral", 1e-10, [] {
    const GridSpec base = GridSpec::make(1, 32.0, 1024);
    const double R = 2.0, s = 0.5;
    const Field f = Field::sample(base, [](const Point& x) { return std::exp(-x[0] * x[0] / 2.0); });
    const Field fR = Field::sample(base.dilated(R), [&](const Point& x) { return std::exp(-x[0] * x[0] / (2.0 * R * R)); });
    const Field a = frac_laplacian_spectral(fR, 2.0 * s);
    const Field b = frac_laplacian_spectral(f, 2.0 * s);
    double worst = 0.0;
    const double scale = std::max(std::abs(a.max()), std::abs(a.min()));
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - std::pow(R, -2.0 * s) * b[j]) / scale);
    return worst;
  }));
  out.push_back(timed("scaling_quadrature", 1e-5, [] {
    const auto [lhs, rhs] = scaling_check(Profile::gaussian(1, 1.0), 0.5, 2.0, {0.0, 0.0});
    return std::abs(lhs - rhs) / std::abs(rhs);
  }));
  out.push_back(timed("mass_ledger", 1e-6, [&] {
    const GridSpec gs = GridSpec::make(1, 32.0, 512);
    ProblemSpec pb{1.0, 0.0, 2.0, AbsorptionSchedule::constant(1.0),
                   Field::sample(gs, [](const Point& x) { return 2.0 * std::exp(-x[0] * x[0]); })};
    SolveOptions so;
    if (opts.inject_nan) so.after_step = [](std::size_t k, Field& u) {
      if (k == 0) u[u.origin_index()] = std::nan("");
    };
    const SolveResult res = solve(pb, StepSchedule::uniform(1.0, 20, 1), so);
    return res.trace.ledger_residual() / res.trace.initial_mass();
  }));
  return out;
}

std::string to_json(const std::vector<SelfTestCheck>& checks) {
  json j;
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"seconds", c.seconds}});
  }
  j["passed"] = all;
  j["checks"] = arr;
  return j.dump(2);
}

}  // namespace mlheat
