// mlheat: kernels, solver runs, trace analysis, sweeps, capacity estimates.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlheat/config.hpp"
#include "mlheat/errors.hpp"
#include "mlheat/fractional.hpp"
#include "mlheat/harness.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/observers.hpp"
#include "mlheat/solver.hpp"

namespace fs = std::filesystem;
using namespace mlheat;

namespace {

fs::path resolve(const fs::path& p) { return p.is_absolute() ? p : output_root() / p; }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "infinity") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (!item.empty()) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("not a number: '" + item + "'");
      }
    }
  }
  return out;
}

struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("-c,--config", a.file, "key = value config file");
  cmd->add_option("-s,--set", a.sets, "override a config key: key=value (repeatable)");
}

ExperimentConfig load_config(const ConfigArgs& a) {
  Config c = a.file.empty() ? Config{} : Config::load(a.file);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return ExperimentConfig::from(c);
}

std::string fmt17(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed local/nonlocal heat equation with absorption"};
  app.require_subcommand(1);

  // kernel
  auto* kernel = app.add_subcommand("kernel", "L^q norms of the mixed kernel E_alpha(t)");
  double k_alpha = 1.0;
  int k_dim = 1;
  std::string k_times = "0.1,1,10", k_q = "1,2,inf";
  double k_L = 0.0, k_tol = 1e-4;
  std::size_t k_n = 0;
  std::string k_out = "kernel.csv";
  bool k_snap = false;
  kernel->add_option("--alpha", k_alpha, "stability index in (0,2)");
  kernel->add_option("--dim", k_dim, "1 or 2");
  kernel->add_option("--times", k_times, "comma-separated times");
  kernel->add_option("--q", k_q, "comma-separated exponents, inf allowed");
  kernel->add_option("--L", k_L, "box half-width (default: resolving grid)");
  kernel->add_option("--n", k_n, "points per axis (with --L)");
  kernel->add_option("--tol", k_tol, "relative tolerance for the resolving grid");
  kernel->add_option("-o,--out", k_out, "CSV path");
  kernel->add_flag("--snapshots", k_snap, "also write each kernel as an FHK1 file next to the CSV");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one configuration; writes trace.csv");
  ConfigArgs s_cfg;
  add_config_flags(solve_cmd, s_cfg);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "classify a trace CSV; JSON report on stdout");
  std::string a_trace, a_snaps, a_out;
  std::optional<double> a_alpha, a_beta, a_p, a_hc, a_sigma;
  int a_dim = 1;
  double a_window = 1.0;
  analyze_cmd->add_option("--trace", a_trace, "trace CSV")->required();
  analyze_cmd->add_option("--alpha", a_alpha);
  analyze_cmd->add_option("--beta", a_beta);
  analyze_cmd->add_option("--p", a_p);
  analyze_cmd->add_option("--h-c", a_hc, "power schedule coefficient (enables condition check)");
  analyze_cmd->add_option("--h-sigma", a_sigma, "power schedule exponent");
  analyze_cmd->add_option("--dim", a_dim);
  analyze_cmd->add_option("--window", a_window, "trailing window in decades of t");
  analyze_cmd->add_option("--snapshots", a_snaps, "snapshot directory for profile errors");
  analyze_cmd->add_option("-o,--out", a_out, "also write the report here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "solve + classify over p, alpha, beta lists");
  ConfigArgs w_cfg;
  add_config_flags(sweep_cmd, w_cfg);

  // capacity
  auto* cap = app.add_subcommand("capacity", "capacity integral against R");
  double c_alpha = 1.0, c_p = 2.0, c_beta = 0.0, c_q0 = 1.5, c_B = 1.0, c_spacing = 0.5;
  int c_dim = 1;
  std::string c_R = "8,16,32,64,128", c_out = "capacity.csv";
  cap->add_option("--alpha", c_alpha);
  cap->add_option("--p", c_p);
  cap->add_option("--beta", c_beta, "only used for the time factors");
  cap->add_option("--q0", c_q0);
  cap->add_option("--B", c_B);
  cap->add_option("--R", c_R, "comma-separated R values");
  cap->add_option("--dim", c_dim);
  cap->add_option("--spacing", c_spacing, "grid spacing in units of B R");
  cap->add_option("-o,--out", c_out, "CSV path");

  // selftest
  auto* st = app.add_subcommand("selftest", "fast consistency checks; JSON on stdout");
  std::string st_alpha = "0.5,1,1.5";
  bool st_nan = false;
  st->add_option("--alpha", st_alpha, "alphas for the kernel checks");
  st->add_flag("--inject-nan", st_nan, "poison the solver run to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*kernel) {
      const auto times = parse_list(k_times);
      const auto qs = parse_list(k_q);
      if (times.empty()) throw ConfigError("no times given");
      double t_min = times.front(), t_max = times.front();
      for (double t : times) {
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
      }
      const GridSpec grid = k_L > 0.0 ? GridSpec::make(k_dim, k_L, k_n)
                                      : resolving_grid(k_dim, k_alpha, t_min, t_max, k_tol);
      std::vector<std::vector<double>> rows;
      const fs::path out = resolve(k_out);
      for (double t : times) {
        const Field e = mixed_kernel(grid, k_alpha, t);
        for (double q : qs) rows.push_back({t, q, lq_norm(e, q)});
        if (k_snap) write_snapshot(out.parent_path() / ("kernel_t" + fmt17(t) + ".fhk"), e);
      }
      write_csv(out, {"t", "q", "norm"}, rows);
      std::cout << "grid L=" << fmt17(grid.half_width()) << " n=" << grid.points() << " -> " << out.string() << '\n';
    } else if (*solve_cmd) {
      const ExperimentConfig cfg = load_config(s_cfg);
      if (cfg.alpha.size() != 1 || cfg.beta.size() != 1 || cfg.p.size() != 1) {
        throw ConfigError("solve takes single alpha, beta, p values; use sweep for lists");
      }
      const fs::path dir = resolve(cfg.output_dir);
      const SolveResult res = run_solve(cfg, cfg.alpha[0], cfg.beta[0], cfg.p[0], dir);
      std::cout << "final mass " << fmt17(res.trace.entries.back().mass) << " ledger residual "
                << fmt17(res.trace.ledger_residual()) << " -> " << (dir / "trace.csv").string() << '\n';
    } else if (*analyze_cmd) {
      AnalyzeInputs in;
      in.dim = a_dim;
      in.window_decades = a_window;
      in.alpha = a_alpha;
      in.beta = a_beta;
      in.p = a_p;
      if (a_hc) in.schedule = AbsorptionSchedule::power(*a_hc, a_sigma.value_or(0.0));
      if (!a_snaps.empty()) in.snapshot_dir = fs::path(a_snaps);
      const std::string report = to_json(analyze(read_trace_csv(a_trace), in));
      std::cout << report << '\n';
      if (!a_out.empty()) {
        std::ofstream(resolve(a_out)) << report << '\n';
      }
    } else if (*sweep_cmd) {
      const ExperimentConfig cfg = load_config(w_cfg);
      const fs::path dir = resolve(cfg.output_dir);
      const SweepReport rep = run_sweep(cfg, dir);
      for (const auto& r : rep.rows) {
        std::cout << "p=" << fmt17(r.p) << " alpha=" << fmt17(r.alpha) << " beta=" << fmt17(r.beta) << " -> "
                  << r.classification << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
      }
      std::cout << "-> " << (dir / "sweep.csv").string() << '\n';
      return rep.exit_code;
    } else if (*cap) {
      const auto Rs = parse_list(c_R);
      if (Rs.empty()) throw ConfigError("no R values given");
      std::vector<double> values;
      for (double R : Rs) {
        const auto spec = TestFunctionSpec::make(c_dim, c_alpha, c_p, c_q0, c_B, R);
        values.push_back(capacity_integral(spec, capacity_grid(spec, c_spacing)));
      }
      const double slope = Rs.size() >= 2 ? loglog_slope(Rs, values) : std::nan("");
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < Rs.size(); ++i) rows.push_back({Rs[i], values[i], slope});
      const fs::path out = resolve(c_out);
      write_csv(out, {"R", "integral", "fitted_slope"}, rows);
      std::cout << "fitted slope " << fmt17(slope) << " (expected " << fmt17(c_dim - c_alpha * c_p / (c_p - 1.0))
                << "); time factors " << fmt17(time_factor_ramp(c_p, c_beta)) << ", "
                << fmt17(time_factor_profile(c_p, c_beta, (2.0 * c_p - 1.0) / (c_p - 1.0))) << " -> " << out.string()
                << '\n';
    } else if (*st) {
      SelfTestOptions opts;
      opts.alphas = parse_list(st_alpha);
      opts.inject_nan = st_nan;
      const auto checks = selftest(opts);
      std::cout << to_json(checks) << '\n';
      for (const auto& c : checks) {
        if (!c.passed) return kExitNumeric;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
