#include "sclab/lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace sclab::lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("config: " + key + " expects a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || t[0] == '-') {
    throw ConfigError("config: " + key + " expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<double> out;
  std::string item;
  while (is >> item) out.push_back(parse_double(key, item));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SCLAB_STRING(key, field)                                                     \
  Key {                                                                               \
    key, [](RunConfig& c, const std::string& v) { c.field = trim(v); },              \
        [](const RunConfig& c) { return c.field; }                                    \
  }
#define SCLAB_DOUBLE(key, field)                                                     \
  Key {                                                                               \
    key, [](RunConfig& c, const std::string& v) { c.field = parse_double(key, v); }, \
        [](const RunConfig& c) { return format_double(c.field); }                     \
  }
#define SCLAB_SIZE(key, field)                                                              \
  Key {                                                                                      \
    key,                                                                                     \
        [](RunConfig& c, const std::string& v) {                                            \
          c.field = static_cast<decltype(c.field)>(parse_unsigned(key, v));                  \
        },                                                                                   \
        [](const RunConfig& c) { return std::to_string(c.field); }                           \
  }
#define SCLAB_LIST(key, field)                                                     \
  Key {                                                                             \
    key, [](RunConfig& c, const std::string& v) { c.field = parse_list(key, v); }, \
        [](const RunConfig& c) { return format_list(c.field); }                     \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      SCLAB_STRING("run.experiment", experiment),
      SCLAB_STRING("run.name", name),
      SCLAB_STRING("run.output_dir", output_dir),
      SCLAB_SIZE("run.seed", seed),
      SCLAB_SIZE("run.threads", threads),
      Key{"run.dump_fields",
          [](RunConfig& c, const std::string& v) { c.dump_fields = parse_bool("run.dump_fields", v); },
          [](const RunConfig& c) { return std::string(c.dump_fields ? "true" : "false"); }},
      SCLAB_STRING("potential.kind", potential),
      SCLAB_DOUBLE("potential.mass", mass),
      SCLAB_DOUBLE("potential.omega", omega),
      SCLAB_DOUBLE("potential.f0", f0),
      SCLAB_LIST("potential.coeffs", coeffs),
      SCLAB_STRING("potential.file", potential_file),
      SCLAB_DOUBLE("packet.hbar", hbar),
      SCLAB_DOUBLE("packet.epsilon", epsilon),
      SCLAB_DOUBLE("packet.k", k),
      SCLAB_DOUBLE("packet.r0", r0),
      SCLAB_DOUBLE("packet.p0", p0),
      SCLAB_LIST("scan.hbar_list", hbar_list),
      SCLAB_LIST("scan.epsilon_list", epsilon_list),
      SCLAB_DOUBLE("numerics.x_min", x_min),
      SCLAB_DOUBLE("numerics.x_max", x_max),
      SCLAB_SIZE("numerics.n", n),
      SCLAB_DOUBLE("numerics.dt", dt),
      SCLAB_DOUBLE("numerics.t_final", t_final),
      SCLAB_SIZE("numerics.snapshots", snapshots),
      SCLAB_DOUBLE("phj.focal_time", focal_time),
      SCLAB_SIZE("phj.oversample", oversample),
      SCLAB_SIZE("liouville.n", phase_n),
      SCLAB_DOUBLE("liouville.sigma_x", sigma_x),
      SCLAB_DOUBLE("liouville.sigma_p", sigma_p),
      SCLAB_SIZE("liouville.samples", samples),
      SCLAB_DOUBLE("detpot.tol", detpot_tol),
  };
  return table;
}

#undef SCLAB_STRING
#undef SCLAB_DOUBLE
#undef SCLAB_SIZE
#undef SCLAB_LIST

const Key& find_key(const std::string& key) {
  for (const auto& k : keys()) {
    if (key == k.name) return k;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void require_positive_list(const char* key, const std::vector<double>& v, std::size_t min_size) {
  if (v.size() < min_size) {
    throw ConfigError(std::string("config: ") + key + " needs at least " +
                      std::to_string(min_size) + " entries");
  }
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError(std::string("config: ") + key + " entries must be > 0");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.emplace_back(k.name);
  return out;
}

bool is_config_key(const std::string& key) {
  return std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return key == k.name; });
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, value);
}

std::string get_key(const RunConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    set_key(cfg, key, line.substr(eq + 1));
  }
  if (!cfg.potential_file.empty() && !base_dir.empty()) {
    const std::filesystem::path p(cfg.potential_file);
    if (p.is_relative() && std::filesystem::exists(base_dir / p)) {
      cfg.potential_file = (base_dir / p).lexically_normal().string();
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::filesystem::path resolve_config_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  const fs::path direct(name_or_path);
  if (fs::is_regular_file(direct)) return direct;
  if (fs::is_regular_file(fs::path(name_or_path + ".ini"))) return name_or_path + ".ini";
#ifdef SCLAB_CONFIG_DIR
  const fs::path bundled = fs::path(SCLAB_CONFIG_DIR) / (name_or_path + ".ini");
  if (fs::is_regular_file(bundled)) return bundled;
#endif
  return direct;
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

void validate(const RunConfig& cfg) {
  if (std::find(std::begin(kExperiments), std::end(kExperiments), cfg.experiment) ==
      std::end(kExperiments)) {
    throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");
  }
  if (!(cfg.mass > 0.0)) throw ConfigError("config: potential.mass must be > 0");
  if (!(cfg.hbar > 0.0)) throw ConfigError("config: packet.hbar must be > 0");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("config: packet.epsilon must be > 0");
  if (!(cfg.k > 0.0)) throw ConfigError("config: packet.k must be > 0");
  if (!(cfg.x_max > cfg.x_min)) throw ConfigError("config: numerics.x_max must exceed x_min");
  if (!(cfg.dt >= 0.0)) throw ConfigError("config: numerics.dt must be >= 0 (0 = automatic)");
  if (!(cfg.t_final > 0.0)) throw ConfigError("config: numerics.t_final must be > 0");
  if (cfg.snapshots == 0) throw ConfigError("config: numerics.snapshots must be >= 1");
  if (cfg.threads == 0) throw ConfigError("config: run.threads must be >= 1");
  if (cfg.oversample == 0) throw ConfigError("config: phj.oversample must be >= 1");
  if (cfg.phase_n < 8) throw ConfigError("config: liouville.n must be >= 8");
  if (!(cfg.sigma_x > 0.0 && cfg.sigma_p > 0.0)) {
    throw ConfigError("config: liouville.sigma_x and sigma_p must be > 0");
  }
  if (!(cfg.detpot_tol > 0.0)) throw ConfigError("config: detpot.tol must be > 0");
  if (cfg.output_dir.empty()) throw ConfigError("config: run.output_dir must not be empty");

  const std::string& e = cfg.experiment;
  if (e == "standard_limit") require_positive_list("scan.hbar_list", cfg.hbar_list, 3);
  if (e == "combined_limit") require_positive_list("scan.hbar_list", cfg.hbar_list, 1);
  if (e == "deterministic_limit") {
    require_positive_list("scan.epsilon_list", cfg.epsilon_list, 3);
    for (std::size_t i = 1; i < cfg.epsilon_list.size(); ++i) {
      if (!(cfg.epsilon_list[i] < cfg.epsilon_list[i - 1])) {
        throw ConfigError("config: scan.epsilon_list must be strictly decreasing");
      }
    }
    if (cfg.potential == "harmonic") {
      const double coherent = cfg.hbar / (cfg.mass * cfg.omega);
      for (double eps : cfg.epsilon_list) {
        if (std::abs(eps - coherent) <= 1e-9 * coherent) {
          throw ConfigError(
              "config: the coherent width hbar/(m omega) has a stationary width and is "
              "excluded from the deterministic-limit scan");
        }
      }
    }
  }
  if (e == "combined_limit") {
    for (std::size_t i = 1; i < cfg.hbar_list.size(); ++i) {
      if (!(cfg.hbar_list[i] < cfg.hbar_list[i - 1])) {
        throw ConfigError("config: scan.hbar_list must be strictly decreasing");
      }
    }
  }
  if ((e == "uncertainty" || e == "detpot") && !cfg.hbar_list.empty()) {
    require_positive_list("scan.hbar_list", cfg.hbar_list, 1);
  }
  if (e == "detpot" && !cfg.epsilon_list.empty()) {
    require_positive_list("scan.epsilon_list", cfg.epsilon_list, 3);
  }
  make_potential(cfg);
  config_grid(cfg);
}

PotentialSpec make_potential(const RunConfig& cfg) {
  const std::string& k = cfg.potential;
  if (k == "free") return PotentialSpec::free(cfg.mass);
  if (k == "constant_force") return PotentialSpec::constant_force(cfg.f0, cfg.mass);
  if (k == "harmonic") {
    if (!(cfg.omega > 0.0)) throw ConfigError("config: potential.omega must be > 0");
    return PotentialSpec::harmonic(cfg.mass, cfg.omega);
  }
  if (k == "polynomial") {
    if (cfg.coeffs.empty()) throw ConfigError("config: polynomial potential needs potential.coeffs");
    return PotentialSpec::polynomial(cfg.coeffs, cfg.mass);
  }
  if (k == "tabulated") {
    if (cfg.potential_file.empty()) {
      throw ConfigError("config: tabulated potential needs potential.file");
    }
    if (!std::filesystem::is_regular_file(cfg.potential_file)) {
      throw ConfigError("potential file not found: " + cfg.potential_file);
    }
    return PotentialSpec::tabulated_from_file(cfg.potential_file, cfg.mass);
  }
  throw ConfigError("config: unknown potential.kind '" + k + "'");
}

Grid config_grid(const RunConfig& cfg) { return sclab::make_grid(cfg.x_min, cfg.x_max, cfg.n); }

}  // namespace sclab::lab
