#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "acqbench/config.hpp"
#include "acqbench/evaluation.hpp"

namespace acqbench::cli {

struct Options {
  std::vector<std::string> overrides;  // --set key.path=value
  std::string seeds;                   // --seeds, replaces the config's list when non-empty
  std::filesystem::path out;           // --out, replaces output_dir when non-empty
  std::size_t jobs = 0;                // 0: ACQBENCH_JOBS, then 1
  bool wall_time = false;
  double critical = eval::kDefaultCritical;
};

/// Reads, overrides and validates one config file.
ConfigFile load(const std::filesystem::path& config, const Options& opt);

std::size_t resolve_jobs(std::size_t flag);

/// Each command throws ConfigError for schema problems and std::exception for anything else.
void cmd_run(const std::filesystem::path& config, const Options& opt);
void cmd_sweep(const std::vector<std::filesystem::path>& configs, const Options& opt);
void cmd_compare(const std::filesystem::path& results_dir, const Options& opt);
void cmd_ablate(const std::filesystem::path& config, const std::string& parameter, const std::vector<double>& values,
                const Options& opt);
void cmd_toy(const Options& opt);

/// The built-in grid-toy experiment used by `toy`, for the given strategy kind.
ConfigFile toy_config(const std::string& strategy_kind);
std::vector<std::string> toy_strategies();

/// Entry point: exit status 0 on success, 2 for usage/config errors, 1 otherwise.
int main(int argc, char** argv);

}  // namespace acqbench::cli
