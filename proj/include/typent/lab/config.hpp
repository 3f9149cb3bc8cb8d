#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace typent::lab {

/// One experiment, read from a flat `key = value` file. Lines starting with
/// '#' and blank lines are ignored. Reserved keys: experiment, seed,
/// n_samples, output_path; every other key is an experiment parameter.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;
  std::optional<std::string> seed;       ///< raw text; parsed as int64 during validation
  std::optional<std::string> n_samples;  ///< raw text
  std::optional<std::string> output_path;
  std::string source_text;               ///< file contents, byte for byte
};

/// Throws InvalidInput on a line without '=', an empty key, or a duplicate key.
ExperimentConfig parse_config(std::string_view text);

/// Reads the file in binary mode; InvalidInput if it cannot be opened.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Any 64-bit signed integer. Throws InvalidInput otherwise.
std::int64_t parse_seed(std::string_view text);

/// The RNG master seed: the two's-complement bit pattern of the signed seed.
inline std::uint64_t master_seed(std::int64_t seed) { return static_cast<std::uint64_t>(seed); }

}  // namespace typent::lab
