#include "mlheat/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mlheat/errors.hpp"

namespace mlheat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys{
      "dim",       "L",           "n",           "alpha",         "beta",         "p",
      "u0_mass",   "u0_width",    "u0_shift",    "h_kind",        "h_c",          "h_sigma",
      "h_table_t", "h_table_h",   "t_end",       "dtau",          "snapshot_tmin", "snapshot_rho",
      "window_decades", "sweep_budget", "write_snapshots", "inject_nan_step", "output_dir", "dealias"};
  return keys;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

long Config::get_int(const std::string& key, long fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key + ": expected an integer");
  return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError(key + ": expected a boolean");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::filesystem::path output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return std::filesystem::current_path();
}

ExperimentConfig ExperimentConfig::from(const Config& c) {
  ExperimentConfig e;
  e.dim = static_cast<int>(c.get_int("dim", e.dim));
  e.half_width = c.get_double("L", e.half_width);
  const long n = c.get_int("n", static_cast<long>(e.points));
  if (n < 16 || !std::has_single_bit(static_cast<unsigned long>(n))) {
    throw ConfigError("n must be a power of two >= 16");
  }
  e.points = static_cast<std::size_t>(n);
  if (e.dim != 1 && e.dim != 2) throw ConfigError("dim must be 1 or 2");
  if (!(e.half_width > 0.0)) throw ConfigError("L must be positive");

  e.alpha = c.get_list("alpha", e.alpha);
  e.beta = c.get_list("beta", e.beta);
  e.p = c.get_list("p", e.p);
  for (double a : e.alpha) {
    if (!(a > 0.0 && a < 2.0)) throw ConfigError("alpha must lie in (0, 2)");
  }
  for (double b : e.beta) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta must be >= 0");
  }
  for (double p : e.p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must exceed 1");
  }

  e.u0_mass = c.get_double("u0_mass", e.u0_mass);
  e.u0_width = c.get_double("u0_width", e.u0_width);
  e.u0_shift = c.get_double("u0_shift", e.u0_shift);
  if (!(e.u0_mass >= 0.0) || !(e.u0_width > 0.0)) throw ConfigError("u0_mass must be >= 0 and u0_width > 0");

  e.h_kind = c.get_string("h_kind", e.h_kind);
  e.h_c = c.get_double("h_c", e.h_c);
  e.h_sigma = c.get_double("h_sigma", e.h_sigma);
  e.h_table_t = c.get_list("h_table_t", {});
  e.h_table_h = c.get_list("h_table_h", {});
  if (e.h_kind != "constant" && e.h_kind != "power" && e.h_kind != "table") {
    throw ConfigError("h_kind must be constant, power, or table");
  }

  e.t_end = c.get_double("t_end", e.t_end);
  e.dtau = c.get_double("dtau", e.dtau);
  e.snapshot_tmin = c.get_double("snapshot_tmin", e.snapshot_tmin);
  e.snapshot_rho = c.get_double("snapshot_rho", e.snapshot_rho);
  if (!(e.t_end > 0.0) || !(e.dtau > 0.0)) throw ConfigError("t_end and dtau must be positive");
  if (!(e.snapshot_tmin > 0.0 && e.snapshot_tmin <= e.t_end) || !(e.snapshot_rho > 1.0)) {
    throw ConfigError("need 0 < snapshot_tmin <= t_end and snapshot_rho > 1");
  }

  e.window_decades = c.get_double("window_decades", e.window_decades);
  const long budget = c.get_int("sweep_budget", static_cast<long>(e.sweep_budget));
  if (budget < 0) throw ConfigError("sweep_budget must be >= 0");
  e.sweep_budget = static_cast<std::size_t>(budget);
  e.write_snapshots = c.get_bool("write_snapshots", e.write_snapshots);
  e.dealias = c.get_bool("dealias", e.dealias);
  e.inject_nan_step = c.get_int("inject_nan_step", e.inject_nan_step);
  e.output_dir = c.get_string("output_dir", e.output_dir.string());
  return e;
}

}  // namespace mlheat
