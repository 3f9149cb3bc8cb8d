#include "typent/lab/record.hpp"

#include "typent/errors.hpp"
#include "typent/parallel.hpp"
#include "typent/rng.hpp"

#include <fmt/format.h>

#include <fstream>

namespace typent::lab {

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return fmt::format("{}", *i);
  if (const auto* d = std::get_if<double>(&cell)) return fmt::format("{:.17g}", *d);
  return quote_if_needed(std::get<std::string>(cell));
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += quote_if_needed(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::logic_error("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

RecordPaths record_paths(const std::filesystem::path& dir, const std::string& experiment, std::int64_t seed) {
  const std::string stem = fmt::format("{}-{}", experiment, seed);
  return {dir / (stem + ".csv"), dir / (stem + ".meta.json")};
}

nlohmann::ordered_json make_metadata(const RunResult& result, const RecordContext& ctx) {
  nlohmann::ordered_json meta;
  const ExperimentConfig& cfg = *ctx.config;
  meta["schema_version"] = kSchemaVersion;
  meta["tool_version"] = kToolVersion;
  meta["experiment"] = cfg.experiment;
  meta["status"] = to_string(result.status);
  if (!result.message.empty()) meta["message"] = result.message;
  meta["config_text"] = cfg.source_text;
  meta["overrides"] = ctx.overrides;
  meta["params"] = cfg.params;
  meta["seed"] = ctx.settings.seed;
  meta["n_samples"] = ctx.settings.n_samples;
  meta["rng"] = {{"engine", kEngineName},
                 {"seed_derivation", kSeedDerivation},
                 {"gaussian_method", kGaussianMethod},
                 {"chunk_size", kChunkSize}};
  meta["threads"] = ctx.settings.threads;
  meta["wall_time_seconds"] = ctx.wall_time_seconds;
  meta["columns"] = result.table.columns;
  meta["rows"] = result.table.rows.size();
  meta["details"] = result.details;
  return meta;
}

RecordPaths write_record(const std::filesystem::path& dir, const RunResult& result, const RecordContext& ctx) {
  std::filesystem::create_directories(dir);
  const RecordPaths paths = record_paths(dir, ctx.config->experiment, ctx.settings.seed);
  write_file(paths.csv, format_csv(result.table));
  write_file(paths.meta, make_metadata(result, ctx).dump(2) + "\n");
  return paths;
}

}  // namespace typent::lab
