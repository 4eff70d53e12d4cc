#include "sclab/lab/record.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sclab::lab {

namespace {

const std::vector<std::string> kSnapshotColumns{
    "run",         "hbar",        "epsilon",       "t",
    "x_mean",      "p_mean",      "var_x",         "var_p",
    "uncertainty_product", "width", "kurtosis_excess", "quantum_term_norm",
    "hj_residual_classical", "hj_residual_quantum", "newton_r", "trajectory_deviation"};
const std::vector<std::string> kDetpotColumns{"epsilon", "residual", "fourier_window_norm"};
const std::vector<std::string> kPhjColumns{"t",        "x_mean",   "p_mean",     "newton_r",
                                           "newton_p", "min_jacobian", "hj_residual"};
const std::vector<std::string> kLiouvilleColumns{"t",        "x_mean",   "p_mean", "mass",
                                                 "l1_to_initial", "newton_r", "newton_p"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

const char* to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Snapshots: return "snapshots";
    case RecordKind::Detpot: return "detpot";
    case RecordKind::Phj: return "phj";
    case RecordKind::Liouville: return "liouville";
  }
  return "?";
}

RecordKind record_kind_from_string(const std::string& name) {
  for (auto k : {RecordKind::Snapshots, RecordKind::Detpot, RecordKind::Phj, RecordKind::Liouville}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("record: unknown record kind '" + name + "'");
}

const std::vector<std::string>& columns(RecordKind kind) {
  switch (kind) {
    case RecordKind::Snapshots: return kSnapshotColumns;
    case RecordKind::Detpot: return kDetpotColumns;
    case RecordKind::Phj: return kPhjColumns;
    case RecordKind::Liouville: return kLiouvilleColumns;
  }
  return kSnapshotColumns;
}

void RunRecord::add_result(const std::string& key, const std::string& value) {
  results.emplace_back(key, value);
}

void RunRecord::add_result(const std::string& key, double value) {
  results.emplace_back(key, format_double(value));
}

const std::string& RunRecord::result(const std::string& key) const {
  for (const auto& [k, v] : results) {
    if (k == key) return v;
  }
  throw ConfigError("record: no result named '" + key + "'");
}

std::vector<double> RunRecord::column(const std::string& name) const {
  const auto& cols = columns(kind);
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw ConfigError("record: no column named '" + name + "'");
  const auto j = static_cast<std::size_t>(it - cols.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

std::vector<double> RunRecord::column(const std::string& name, std::size_t run) const {
  if (kind != RecordKind::Snapshots) return run == 0 ? column(name) : std::vector<double>{};
  const auto all = column(name);
  const auto ids = column("run");
  std::vector<double> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (ids[i] == static_cast<double>(run)) out.push_back(all[i]);
  }
  return out;
}

std::string to_csv(const RunRecord& record) {
  std::string out = "# schema_version = " + std::to_string(kSchemaVersion) + "\n";
  out += "# record = " + std::string(to_string(record.kind)) + "\n";
  for (const auto& [k, v] : config_echo(record.config)) out += "# config." + k + " = " + v + "\n";
  for (const auto& [k, v] : record.results) out += "# result." + k + " = " + v + "\n";
  const auto& cols = columns(record.kind);
  for (std::size_t j = 0; j < cols.size(); ++j) out += (j ? "," : "") + cols[j];
  out += "\n";
  for (const auto& row : record.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + format_double(row[j]);
    out += "\n";
  }
  return out;
}

RunRecord parse_csv(const std::string& text) {
  RunRecord rec;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "schema_version") {
        if (value != std::to_string(kSchemaVersion)) {
          throw ConfigError("record: unsupported schema version " + value);
        }
      } else if (key == "record") {
        rec.kind = record_kind_from_string(value);
      } else if (key.rfind("config.", 0) == 0) {
        set_key(rec.config, key.substr(7), value);
      } else if (key.rfind("result.", 0) == 0) {
        rec.results.emplace_back(key.substr(7), value);
      }
      continue;
    }
    const auto& cols = columns(rec.kind);
    if (!header_seen) {
      std::string want;
      for (std::size_t j = 0; j < cols.size(); ++j) want += (j ? "," : "") + cols[j];
      if (trim(line) != want) throw ConfigError("record: header does not match the schema");
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != cols.size()) throw ConfigError("record: row width does not match header");
    rec.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ConfigError("record: missing header row");
  return rec;
}

RunRecord read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("record file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string summary_text(const RunRecord& record) {
  std::string out = "experiment: " + record.config.experiment + "\n";
  out += "record: " + std::string(to_string(record.kind)) + "\n";
  out += "rows: " + std::to_string(record.rows.size()) + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "wall_seconds: %.3f\n", record.wall_seconds);
  out += buf;
  for (const auto& [k, v] : record.results) out += k + ": " + v + "\n";
  return out;
}

std::filesystem::path write_record(const RunRecord& record) {
  namespace fs = std::filesystem;
  const fs::path dir(record.config.output_dir);
  fs::create_directories(dir);
  const std::string stem = record.config.stem();
  const fs::path csv = dir / (stem + ".csv");
  write_file(csv, to_csv(record));
  write_file(dir / (stem + "_summary.txt"), summary_text(record));
  for (const auto& f : record.fields) {
    std::string text = "x,rho,S\n";
    for (std::size_t i = 0; i < f.x.size(); ++i) {
      text += format_double(f.x[i]) + "," + format_double(f.rho[i]) + "," +
              format_double(f.S[i]) + "\n";
    }
    write_file(dir / (stem + "_fields_r" + std::to_string(f.run) + "_s" +
                      std::to_string(f.snapshot) + ".csv"),
               text);
  }
  return csv;
}

}  // namespace sclab::lab
