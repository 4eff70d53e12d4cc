#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sclab/lab/config.hpp"

namespace sclab::lab {

inline constexpr int kSchemaVersion = 1;

/// Column layouts. Each record kind has a fixed header pinned by tests.
enum class RecordKind { Snapshots, Detpot, Phj, Liouville };

const char* to_string(RecordKind kind);
RecordKind record_kind_from_string(const std::string& name);
const std::vector<std::string>& columns(RecordKind kind);

/// One field dump: x, rho and S of one run at one snapshot.
struct FieldDump {
  std::size_t run = 0;
  std::size_t snapshot = 0;
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> S;
};

/// Result of one experiment: the config it came from, one row per snapshot
/// (per scan entry) and named fits and verdicts.
struct RunRecord {
  RunConfig config;
  RecordKind kind = RecordKind::Snapshots;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<FieldDump> fields;
  double wall_seconds = 0.0;

  void add_result(const std::string& key, const std::string& value);
  void add_result(const std::string& key, double value);
  /// Value of a named result; ConfigError when absent.
  const std::string& result(const std::string& key) const;
  /// Column values of the rows whose "run" column equals `run` (all rows for
  /// record kinds without a run column when run is 0).
  std::vector<double> column(const std::string& name) const;
  std::vector<double> column(const std::string& name, std::size_t run) const;
};

/// CSV text: "# key = value" lines for schema, config echo and results,
/// then the header and rows at 17 significant digits. Wall-clock time is
/// left out so that identical runs give identical bytes.
std::string to_csv(const RunRecord& record);
RunRecord parse_csv(const std::string& text);
RunRecord read_csv(const std::filesystem::path& path);

/// Plain-text summary including wall-clock time.
std::string summary_text(const RunRecord& record);

/// Writes <output_dir>/<stem>.csv, <stem>_summary.txt and the field dumps.
/// Returns the CSV path.
std::filesystem::path write_record(const RunRecord& record);

}  // namespace sclab::lab
