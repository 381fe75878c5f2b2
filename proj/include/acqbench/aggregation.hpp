#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "acqbench/tensor.hpp"

// Structures that combine acquisition strategies into one per-round batch selector.
//
// A Selector picks `budget` candidate ids out of `pool` (ids, not positions) and returns them in
// its own preference order. Whatever model state a strategy needs is captured by the callable.
namespace acqbench::agg {

using CandidateIds = std::vector<std::size_t>;
using Selector = std::function<CandidateIds(std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed)>;

enum class Phase { Explore, Exploit };
std::string_view phase_name(Phase p) noexcept;

/// Stage i keeps floor(kappas[i] * b) candidates out of stage i-1's output. The last factor must be 1.
CandidateIds series_select(std::span<const Selector> stages, std::span<const double> kappas,
                           std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed);

/// Seeded split of the pool into two halves (each sorted by id); each selector takes b/2 from its half.
CandidateIds parallel_select(const Selector& first, const Selector& second, std::span<const std::size_t> pool,
                             std::size_t budget, std::uint64_t seed);

/// Ordinal rank by descending score (ties: lower position ranks better); pick the b smallest rank sums.
/// Returns positions.
SelectionBatch parallel_ranked_select(const ScoreVector& first, const ScoreVector& second, std::size_t budget);

struct HybridSpec {
  std::size_t first_budget = 0;
  std::size_t second_budget = 0;
};

/// `first` picks from the full pool, `second` from what remains.
CandidateIds hybrid_select(const HybridSpec& spec, const Selector& first, const Selector& second,
                           std::span<const std::size_t> pool, std::uint64_t seed);

struct FeedbackState {
  double beta = 0.5;
  std::vector<double> losses;
  std::size_t window = 5;
  double lambda = 0.9;
  double epsilon = 0.1;
  double scaled = 0.0;  // s_t from the most recent update

  void validate() const;
};

/// Appends the loss, smooths the history with a trailing moving average of width `window`, min-max
/// scales the last `window` smoothed values and applies beta <- clip(lambda * beta * exp(s), eps, 1 - eps).
FeedbackState feedback_update(FeedbackState state, double new_loss);

/// beta <= 0.5 explores.
Phase feedback_decision(const FeedbackState& state) noexcept;

struct RoutedSelection {
  CandidateIds batch;
  Phase phase = Phase::Explore;
};

RoutedSelection feedback_select(const FeedbackState& state, const Selector& explore, const Selector& exploit,
                                std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed);

struct AnnealingSchedule {
  std::size_t initial_exploration = 5;
  std::size_t first_exploit = 5;
  std::size_t explore = 5;
  double rate = 1.5;

  void validate() const;
  /// floor(rate * len), guarded against representation error just below an integer.
  std::size_t next_exploit_length(std::size_t len) const noexcept;
};

/// Phase of 1-based round `t`.
Phase annealing_phase(const AnnealingSchedule& schedule, std::size_t t);

/// Counter-based fair coin keyed by (seed, t).
Phase random_alternate(std::uint64_t seed, std::size_t t) noexcept;

}  // namespace acqbench::agg
