#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acqbench/datasets.hpp"
#include "acqbench/model.hpp"
#include "acqbench/strategy.hpp"

namespace acqbench {

/// How to build the dataset for an experiment. Numeric parameters by name; `path`/`label` for CSV.
struct DatasetSpec {
  std::string kind = "grid_toy";  // grid_toy | blobs | csv
  std::map<std::string, double> numbers;
  std::string path;
  std::string label_column;  // name, or a decimal index
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
};

/// Builds the dataset and its train/test split. Depends only on the spec, never on the run seed.
std::pair<Dataset, Dataset> build_dataset(const DatasetSpec& spec);

struct ExperimentConfig {
  DatasetSpec dataset;
  Architecture arch;  // input_dim/classes are taken from the dataset
  TrainConfig train;  // seed is replaced per round
  MCConfig mc;        // seed is replaced per call
  std::size_t initial_labeled = 20;  // M
  std::size_t rounds = 10;           // T, acquisition rounds performed
  std::size_t budget = 10;           // b
  std::size_t pool_size = 0;         // |D_pool|; 0 means the whole unlabeled remainder
  StrategySpec strategy;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RoundEntry {
  std::size_t round = 0;
  std::size_t n_labeled = 0;
  double test_accuracy = 0.0;
  double batch_loss_prev_model = 0.0;  // NaN for round 0
  std::string strategy_tag;
  double acq_ms = 0.0;
  double train_ms = 0.0;
  std::size_t pool_size = 0;
  InferenceCost cost;
  std::vector<std::size_t> selected;  // training-set row ids acquired this round
};

struct RunRecord {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<RoundEntry> rounds;  // rounds[0] is the initial model
  std::vector<std::size_t> labeled;  // final labeled ids, in acquisition order
  ModelParams final_model;

  double final_accuracy() const { return rounds.empty() ? 0.0 : rounds.back().test_accuracy; }
};

/// One pool-based run. Everything random is keyed by (cfg.seed, round, purpose).
RunRecord run_experiment(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test);
RunRecord run_experiment(const ExperimentConfig& cfg);

/// Independent runs, one per seed, returned in the order of `seeds`. `jobs` bounds the worker count.
std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1);

}  // namespace acqbench
