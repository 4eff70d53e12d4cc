#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/grid.hpp"
#include "sclab/potential.hpp"

namespace sclab::lab {

/// Malformed or inconsistent configuration (CLI exit code 1).
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Everything needed to (re)run one experiment. Keys are addressed as
/// "section.key" both in files and in --section.key=value overrides.
struct RunConfig {
  std::string experiment = "uncertainty";
  std::string name;  ///< output stem; the experiment name when empty
  std::string output_dir = "runs";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool dump_fields = false;

  std::string potential = "free";  ///< free | constant_force | harmonic | polynomial | tabulated
  double mass = 1.0;
  double omega = 1.0;
  double f0 = 0.0;
  std::vector<double> coeffs;
  std::string potential_file;

  double hbar = 1.0;
  double epsilon = 0.5;
  double k = 1.0;  ///< combined limit: epsilon = k * hbar
  double r0 = 0.0;
  double p0 = 0.0;

  std::vector<double> hbar_list;
  std::vector<double> epsilon_list;

  double x_min = -20.0;
  double x_max = 20.0;
  std::size_t n = 1024;
  double dt = 0.0;  ///< 0 picks 90% of the stable step
  double t_final = 1.0;
  std::size_t snapshots = 10;

  double focal_time = 0.0;  ///< phj_demo: S0 = p0 x - m x^2 / (2 focal_time)
  std::size_t oversample = 4;

  std::size_t phase_n = 128;
  double sigma_x = 0.2;
  double sigma_p = 0.2;
  std::size_t samples = 8;  ///< random Newton trajectories for the delta ansatz

  double detpot_tol = 1e-8;

  std::string stem() const { return name.empty() ? experiment : name; }
};

inline constexpr const char* kExperiments[] = {
    "standard_limit", "deterministic_limit", "combined_limit", "uncertainty",
    "detpot",         "phj_demo",            "liouville_demo"};

/// Key names in canonical (echo) order.
std::vector<std::string> config_keys();
bool is_config_key(const std::string& key);

/// Sets one key from its text form (ConfigError on unknown key or bad value).
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_key(const RunConfig& cfg, const std::string& key);

/// "[section]" headers, "key = value" lines, '#' or ';' comments.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Missing file is a ConfigError naming the path.
RunConfig load_config(const std::filesystem::path& path);

/// Tries the argument as a path, then with ".ini", then in the bundled
/// config directory. Returns the argument unchanged when nothing exists.
std::filesystem::path resolve_config_path(const std::string& name_or_path);

/// Every key with its canonical value, in config_keys() order.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

/// Range and consistency checks shared by every experiment.
void validate(const RunConfig& cfg);

PotentialSpec make_potential(const RunConfig& cfg);
Grid config_grid(const RunConfig& cfg);

/// %.17g, which round-trips doubles.
std::string format_double(double v);

}  // namespace sclab::lab
