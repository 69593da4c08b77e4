#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlheat {

/// Flat key = value text. '#' starts a comment; lists are comma separated.
/// Unknown keys are rejected so typos fail loudly.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  /// Flag overrides go through here; the key must be known.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

/// Root for relative output paths: $MLHEAT_OUTPUT_ROOT, else the working directory.
std::filesystem::path output_root();
inline constexpr const char* kOutputRootEnv = "MLHEAT_OUTPUT_ROOT";

struct ExperimentConfig {
  int dim = 1;
  double half_width = 400.0;
  std::size_t points = 8192;

  std::vector<double> alpha{1.0};
  std::vector<double> beta{0.0};
  std::vector<double> p{3.0};

  double u0_mass = 0.1;
  double u0_width = 1.0;
  double u0_shift = 0.0;

  std::string h_kind = "constant";
  double h_c = 1.0;
  double h_sigma = 0.0;
  std::vector<double> h_table_t, h_table_h;

  double t_end = 1000.0;
  double dtau = 0.1;
  double snapshot_tmin = 1.0;
  double snapshot_rho = 1.189207115002721;

  double window_decades = 1.0;
  std::size_t sweep_budget = 64;
  bool write_snapshots = false;
  bool dealias = false;
  long inject_nan_step = -1;  ///< test hook: poison the iterate after this step

  std::filesystem::path output_dir = "mlheat_out";

  /// Validates ranges (alpha in (0, 2), p > 1, beta >= 0, grid shape, times).
  static ExperimentConfig from(const Config& c);
};

}  // namespace mlheat
