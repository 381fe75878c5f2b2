#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "acqbench/aggregation.hpp"
#include "acqbench/datasets.hpp"
#include "acqbench/model.hpp"

namespace acqbench {

/// Forward passes spent by acquisition in one round, one count per sample and pass.
struct InferenceCost {
  std::size_t mc_scoring = 0;
  std::size_t feature_extraction = 0;

  std::size_t total() const noexcept { return mc_scoring + feature_extraction; }
};

/// What a strategy may look at while selecting. All model access goes through the metered helpers.
class RoundContext {
 public:
  RoundContext(const ModelParams& model, const Dataset& train, std::span<const std::size_t> labeled,
               const MCConfig& mc, std::size_t round, std::uint64_t run_seed = 0)
      : model_(model), train_(train), labeled_(labeled), mc_(mc), round_(round), run_seed_(run_seed) {}

  std::size_t round() const noexcept { return round_; }
  std::uint64_t run_seed() const noexcept { return run_seed_; }
  std::span<const std::size_t> labeled() const noexcept { return labeled_; }
  const Dataset& train() const noexcept { return train_; }
  const InferenceCost& cost() const noexcept { return cost_; }

  /// N_mc passes over `ids`; `seed` replaces the configured MC seed.
  ProbabilityTensor mc_probabilities(std::span<const std::size_t> ids, std::uint64_t seed);
  FeatureMatrix features_of(std::span<const std::size_t> ids);

 private:
  Matrix rows(std::span<const std::size_t> ids) const;

  const ModelParams& model_;
  const Dataset& train_;
  std::span<const std::size_t> labeled_;
  MCConfig mc_;
  std::size_t round_;
  std::uint64_t run_seed_;
  InferenceCost cost_;
};

/// Declarative description of an acquisition pipeline, as read from a config file.
struct StrategySpec {
  std::string kind;
  std::string name;  // display/output name; derived from kind and constituents when empty
  std::vector<StrategySpec> constituents;

  std::optional<double> power;               // power_bald
  std::vector<double> kappa;                 // series, one per stage
  std::optional<std::size_t> first_budget;   // hybrid
  std::optional<double> lambda;              // feedback
  std::optional<double> epsilon;             // feedback
  std::optional<std::size_t> window;         // feedback
  std::optional<agg::AnnealingSchedule> schedule;  // annealing

  /// Name used for output directories and heatmap labels.
  std::string display_name() const;
};

/// Every kind make_strategy understands.
std::span<const std::string_view> strategy_kinds();
bool is_scoring_kind(std::string_view kind);

struct Selection {
  agg::CandidateIds ids;
  std::string tag;  // constituent actually executed
};

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget,
                           std::uint64_t seed) = 0;
  /// Available only for scorer-backed kinds.
  virtual std::optional<ScoreVector> scores(RoundContext& ctx, std::span<const std::size_t> pool, std::uint64_t seed) {
    (void)ctx, (void)pool, (void)seed;
    return std::nullopt;
  }
  /// Loss of the previous model on the batch this strategy just selected.
  virtual void observe_batch_loss(double loss) { (void)loss; }
  virtual std::string name() const = 0;
};

/// Validates the spec and builds a fresh, stateful strategy instance (one per run).
std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec);

}  // namespace acqbench
