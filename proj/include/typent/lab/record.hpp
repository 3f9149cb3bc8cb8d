#pragma once

#include "typent/lab/config.hpp"
#include "typent/lab/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace typent::lab {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

/// 17 significant digits, '.' decimal point, independent of the C locale.
std::string format_cell(const Cell& cell);
std::string format_csv(const Table& table);

struct RecordPaths {
  std::filesystem::path csv;
  std::filesystem::path meta;
};

/// <dir>/<experiment>-<seed>.csv and .meta.json
RecordPaths record_paths(const std::filesystem::path& dir, const std::string& experiment, std::int64_t seed);

struct RecordContext {
  const ExperimentConfig* config = nullptr;
  RunSettings settings;
  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  double wall_time_seconds = 0.0;
};

nlohmann::ordered_json make_metadata(const RunResult& result, const RecordContext& ctx);

/// Creates `dir` if needed and writes both files.
RecordPaths write_record(const std::filesystem::path& dir, const RunResult& result, const RecordContext& ctx);

}  // namespace typent::lab
