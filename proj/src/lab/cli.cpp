#include "sclab/lab/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sclab/lab/config.hpp"
#include "sclab/lab/experiments.hpp"
#include "sclab/lab/record.hpp"

namespace sclab::lab {

namespace {

constexpr const char* kScanExperiments[] = {"standard_limit", "deterministic_limit",
                                            "combined_limit", "uncertainty"};

std::string usage_text() {
  std::string s =
      "usage: sclab <simulate|scan|detpot|phj|liouville|report> [options]\n"
      "  --config NAME      config file, or the name of a bundled config\n"
      "  --dump-fields      write x, rho, S per snapshot next to the CSV\n"
      "  --input FILE       (report) run record CSV to summarize\n"
      "  --SECTION.KEY=VAL  override any config key:\n";
  for (const auto& k : config_keys()) s += "      " + k + "\n";
  return s;
}

/// Splits "--section.key=value" overrides from the arguments CLI11 parses.
std::pair<std::vector<std::pair<std::string, std::string>>, std::vector<std::string>> split_overrides(
    int argc, const char* const* argv) {
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> rest;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    const auto eq = a.find('=');
    if (a.rfind("--", 0) == 0 && eq != std::string::npos) {
      const std::string key = a.substr(2, eq - 2);
      if (key.find('.') != std::string::npos) {
        if (!is_config_key(key)) throw ConfigError("unknown config key --" + key);
        overrides.emplace_back(key, a.substr(eq + 1));
        continue;
      }
    }
    rest.push_back(a);
  }
  return {std::move(overrides), std::move(rest)};
}

std::string one_line(const RunRecord& rec, const std::string& path) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2f s)", rec.wall_seconds);
  std::string s = rec.config.experiment + ": " + std::to_string(rec.rows.size()) + " rows -> " + path;
  for (const char* key : {"verdict", "detpot_verdict", "floor_holds", "caustic_time",
                          "quantum_term_exponent", "width_ratio_exponent", "deviation_monotone"}) {
    for (const auto& [k, v] : rec.results) {
      if (k == key) s += ", " + k + "=" + v;
    }
  }
  return s + buf;
}

int run(int argc, const char* const* argv, std::ostream& out) {
  auto [overrides, rest] = split_overrides(argc, argv);

  CLI::App app{"sclab: semiclassical limit experiments"};
  app.require_subcommand(1);
  std::string config_name, input;
  bool dump = false;
  for (const char* name : {"simulate", "scan", "detpot", "phj", "liouville", "report"}) {
    auto* sub = app.add_subcommand(name);
    if (std::string(name) == "report") {
      sub->add_option("--input,input", input, "run record CSV")->required();
    } else {
      sub->add_option("--config", config_name, "config file or bundled config name");
      sub->add_flag("--dump-fields", dump, "write per-snapshot field dumps");
    }
  }
  std::vector<std::string> args(rest.rbegin(), rest.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << usage_text();
    return 0;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string(e.what()) + "\n" + usage_text());
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  if (cmd == "report") {
    const auto rec = read_csv(input);
    out << summary_text(rec);
    return 0;
  }

  RunConfig cfg;
  if (!config_name.empty()) {
    const auto path = resolve_config_path(config_name);
    // A run record carries its whole config.
    cfg = path.extension() == ".csv" ? read_csv(path).config : load_config(path);
  }
  for (const auto& [k, v] : overrides) set_key(cfg, k, v);
  if (dump) cfg.dump_fields = true;

  if (cmd == "simulate") cfg.experiment = "uncertainty";
  if (cmd == "detpot") cfg.experiment = "detpot";
  if (cmd == "phj") cfg.experiment = "phj_demo";
  if (cmd == "liouville") cfg.experiment = "liouville_demo";
  if (cmd == "scan" && std::find(std::begin(kScanExperiments), std::end(kScanExperiments),
                                 cfg.experiment) == std::end(kScanExperiments)) {
    throw ConfigError("scan: run.experiment must be a limit scan or uncertainty, got '" +
                      cfg.experiment + "'");
  }

  const auto rec = run_experiment(cfg);
  const auto path = write_record(rec);
  out << one_line(rec, path.string()) << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(argc, argv, out);
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sclab::lab
