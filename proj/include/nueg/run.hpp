#pragma once

#include "nueg/config.hpp"
#include "nueg/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nueg::run {

inline constexpr const char* kVersion = "1.0.0";

const std::vector<std::string>& experiment_kinds();

struct RunConfig {
  config::Config cfg;
  std::string kind;               // from [experiment] kind unless forced
  std::optional<std::uint64_t> seed;
  std::optional<long long> budget;
  std::string out_dir;            // empty: no files written
};

struct CsvRow {
  double scale = 0.0;
  double value = 0.0;
  double err_low = 0.0;
  double err_high = 0.0;
  std::string status;
};

struct RunRecord {
  std::string config_hash;
  io::Json record;                // full JSON document (no wall-clock data)
  std::vector<CsvRow> table;      // sequence experiments only
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

// Reads [experiment] kind when `forced_kind` is empty.
RunConfig make_run_config(config::Config cfg, const std::string& forced_kind = "");

RunRecord run(const RunConfig& rc);

// record.json, summary.csv (when the table is nonempty) and timing.json.
void write_outputs(const RunRecord& rec, const std::string& dir);

std::string csv(const std::vector<CsvRow>& rows);

} // namespace nueg::run
