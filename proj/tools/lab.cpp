// Experiment runner: lab run | validate | list.
#include "typent/errors.hpp"
#include "typent/lab/config.hpp"
#include "typent/lab/experiments.hpp"
#include "typent/lab/record.hpp"

#include "CLI11.hpp"
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;
constexpr int kExitNonConverged = 4;

using namespace typent;
using namespace typent::lab;

std::size_t resolve_threads(const std::optional<std::size_t>& flag) {
  if (flag) return std::max<std::size_t>(1, *flag);
  if (const char* env = std::getenv("LAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw InvalidInput(fmt::format("LAB_THREADS='{}' is not a positive integer", env));
    return static_cast<std::size_t>(v);
  }
  return 1;
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const Diagnostic& d : diags) std::cerr << fmt::format("  {}: {}\n", d.key, d.message);
}

int cmd_list() {
  for (const ExperimentInfo& e : experiments()) {
    std::cout << fmt::format("{}\n  {}\n  n_samples: {}\n", e.name, e.summary, e.uses_samples ? "required" : "unused");
    for (const ParamSpec& p : e.params) {
      std::string detail = std::string(to_string(p.type));
      if (!p.choices.empty()) detail += fmt::format(" [{}]", fmt::join(p.choices, "|"));
      const std::string def = p.required ? "required" : fmt::format("default '{}'", p.default_value);
      std::cout << fmt::format("  {:<14} {:<26} {:<22} {}\n", p.name, detail, def, p.help);
    }
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return kExitUsage;
  }
  const std::vector<Diagnostic> diags = validate(cfg);
  if (diags.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  std::cerr << fmt::format("{}: {} problem(s)\n", path, diags.size());
  print_diagnostics(diags);
  return kExitUsage;
}

struct RunArgs {
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<std::string> samples;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg;
  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  std::size_t threads = 1;
  try {
    cfg = load_config(args.config_path);
    threads = resolve_threads(args.threads);
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return kExitUsage;
  }
  if (args.seed) {
    cfg.seed = *args.seed;
    overrides["seed"] = *args.seed;
  }
  if (args.samples) {
    cfg.n_samples = *args.samples;
    overrides["n_samples"] = *args.samples;
  }
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << fmt::format("error: --set expects key=value, got '{}'\n", kv);
      return kExitUsage;
    }
    const std::string key = kv.substr(0, eq);
    if (key == "experiment" || key == "seed" || key == "n_samples" || key == "output_path") {
      std::cerr << fmt::format("error: '{}' has its own flag or cannot be overridden\n", key);
      return kExitUsage;
    }
    cfg.params[key] = kv.substr(eq + 1);
    overrides["params"][key] = kv.substr(eq + 1);
  }

  const std::vector<Diagnostic> diags = validate(cfg);
  if (!diags.empty()) {
    std::cerr << fmt::format("{}: invalid configuration\n", args.config_path);
    print_diagnostics(diags);
    return kExitUsage;
  }

  RunSettings settings;
  settings.seed = parse_seed(*cfg.seed);
  settings.n_samples = cfg.n_samples ? static_cast<std::size_t>(std::stoull(*cfg.n_samples)) : 0;
  settings.threads = threads;
  const std::filesystem::path out_dir = args.out ? *args.out : cfg.output_path.value_or(".");
  if (args.out) overrides["output_path"] = *args.out;

  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    result = run_experiment(cfg, settings);
  } catch (const CapabilityError& e) {
    std::cerr << fmt::format("capability error: {}\n", e.what());
    return kExitCapability;
  } catch (const UnsupportedInput& e) {
    std::cerr << fmt::format("unsupported input: {}\n", e.what());
    return kExitCapability;
  } catch (const InvalidInput& e) {
    std::cerr << fmt::format("invalid input: {}\n", e.what());
    return kExitUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RecordContext ctx{&cfg, settings, overrides, wall};
  const RecordPaths paths = write_record(out_dir, result, ctx);
  std::cout << fmt::format("wrote {}\nwrote {}\n", paths.csv.string(), paths.meta.string());
  if (result.status == RunStatus::NonConverged) {
    std::cerr << fmt::format("not converged: {} (partial results flagged in metadata)\n", result.message);
    return kExitNonConverged;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typical-entanglement experiment runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run an experiment config and write <experiment>-<seed>.csv/.meta.json");
  run->add_option("config", run_args.config_path, "config file")->required();
  run->add_option("--seed", run_args.seed, "override the seed (any 64-bit signed integer)");
  run->add_option("--samples", run_args.samples, "override n_samples");
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--threads", run_args.threads, "worker threads (default: LAB_THREADS or 1)");
  run->add_option("--set", run_args.sets, "override a parameter, key=value (repeatable)");

  std::string validate_path;
  CLI::App* val = app.add_subcommand("validate", "check a config against its experiment schema");
  val->add_option("config", validate_path, "config file")->required();

  app.add_subcommand("list", "list experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*val) return cmd_validate(validate_path);
    return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return 1;
  }
}
