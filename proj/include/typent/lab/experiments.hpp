#pragma once

#include "typent/lab/config.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace typent::lab {

enum class ParamType { Integer, Real, IntegerList, RealList, Choice };

std::string_view to_string(ParamType type);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Integer;
  bool required = false;
  std::string default_value;         ///< used when absent and not required
  std::vector<std::string> choices;  ///< for ParamType::Choice
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  bool uses_samples = true;  ///< n_samples is required
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo* find_experiment(std::string_view name);

struct Diagnostic {
  std::string key;
  std::string message;
};

/// Schema check without running anything. Never throws; an empty result means valid.
std::vector<Diagnostic> validate(const ExperimentConfig& config);

/// A CSV cell; an empty string is written as an empty field.
using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class RunStatus { Ok, NonConverged };
std::string_view to_string(RunStatus status);

struct RunResult {
  Table table;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  RunStatus status = RunStatus::Ok;
  std::string message;
};

struct RunSettings {
  std::int64_t seed = 0;
  std::size_t n_samples = 0;
  std::size_t threads = 1;
};

/// Executes a config that passed validate(). Library errors propagate
/// (InvalidInput, CapabilityError); a Coulomb-gas non-convergence is
/// reported through RunStatus::NonConverged with the best iterate.
RunResult run_experiment(const ExperimentConfig& config, const RunSettings& settings);

}  // namespace typent::lab
