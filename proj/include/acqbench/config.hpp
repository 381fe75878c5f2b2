#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "acqbench/simulator.hpp"

namespace acqbench {

/// A schema violation; the message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFile {
  ExperimentConfig experiment;  // experiment.seed is unused; see `seeds`
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "results";
};

/// Validates the document against the schema and fills in defaults. Unknown keys are rejected.
ConfigFile parse_config(const nlohmann::json& doc);
ConfigFile load_config(const std::filesystem::path& path);

StrategySpec parse_strategy(const nlohmann::json& doc, const std::string& where = "strategy");
nlohmann::json strategy_to_json(const StrategySpec& spec);
nlohmann::json config_to_json(const ConfigFile& cfg);

/// Applies "a.b.c=value" to a document; value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// "1,2,5" or "1-10" or a mix such as "1-3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace acqbench
