#include "acqbench/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "acqbench/rng.hpp"

namespace acqbench::agg {

namespace {

void check_batch(const CandidateIds& got, std::span<const std::size_t> from, std::size_t budget, const char* who) {
  if (got.size() != budget)
    throw std::runtime_error(std::string(who) + ": constituent returned " + std::to_string(got.size()) +
                             " candidates, expected " + std::to_string(budget));
  std::unordered_set<std::size_t> allowed(from.begin(), from.end());
  std::unordered_set<std::size_t> seen;
  for (auto id : got) {
    if (!allowed.count(id)) throw std::runtime_error(std::string(who) + ": constituent picked a candidate outside its pool");
    if (!seen.insert(id).second) throw std::runtime_error(std::string(who) + ": constituent picked a candidate twice");
  }
}

CandidateIds run_checked(const Selector& s, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed,
                         const char* who) {
  CandidateIds out = s(pool, budget, seed);
  check_batch(out, pool, budget, who);
  return out;
}

// Ordinal ranks, 1 = best. Equal scores: lower position gets the better rank.
std::vector<std::size_t> ordinal_ranks(const ScoreVector& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  std::vector<std::size_t> rank(s.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

}  // namespace

std::string_view phase_name(Phase p) noexcept { return p == Phase::Explore ? "explore" : "exploit"; }

CandidateIds series_select(std::span<const Selector> stages, std::span<const double> kappas,
                           std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) {
  if (stages.empty()) throw std::invalid_argument("series: needs at least one stage");
  if (kappas.size() != stages.size()) throw std::invalid_argument("series: one subsample factor per stage required");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] >= 1.0) || !std::isfinite(kappas[i])) throw std::invalid_argument("series: subsample factors must be >= 1");
    if (i > 0 && kappas[i] > kappas[i - 1]) throw std::invalid_argument("series: subsample factors must be non-increasing");
  }
  if (kappas.back() != 1.0) throw std::invalid_argument("series: the last stage must select exactly the budget (factor 1)");

  CandidateIds current(pool.begin(), pool.end());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto stage_budget = static_cast<std::size_t>(std::floor(kappas[i] * static_cast<double>(budget) + 1e-9));
    if (stage_budget > current.size())
      throw std::invalid_argument("series: stage " + std::to_string(i + 1) + " needs " + std::to_string(stage_budget) +
                                  " candidates but only " + std::to_string(current.size()) + " are available");
    current = run_checked(stages[i], current, stage_budget, derive_seed(seed, {i}), "series");
  }
  return current;
}

CandidateIds parallel_select(const Selector& first, const Selector& second, std::span<const std::size_t> pool,
                             std::size_t budget, std::uint64_t seed) {
  if (budget % 2 != 0) throw std::invalid_argument("parallel: budget must be even");
  if (pool.size() < budget) throw std::invalid_argument("parallel: pool smaller than budget");
  CandidateIds shuffled(pool.begin(), pool.end());
  Rng rng(derive_seed(seed, {0xa11}));
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const std::size_t half = shuffled.size() / 2;
  CandidateIds left(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(half));
  CandidateIds right(shuffled.begin() + static_cast<std::ptrdiff_t>(half), shuffled.end());
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  const std::size_t each = budget / 2;
  if (left.size() < each || right.size() < each) throw std::invalid_argument("parallel: a pool half is smaller than b/2");

  CandidateIds out = run_checked(first, left, each, derive_seed(seed, {1}), "parallel");
  const CandidateIds other = run_checked(second, right, each, derive_seed(seed, {2}), "parallel");
  out.insert(out.end(), other.begin(), other.end());
  return out;
}

SelectionBatch parallel_ranked_select(const ScoreVector& first, const ScoreVector& second, std::size_t budget) {
  if (first.size() != second.size()) throw std::invalid_argument("parallel_ranked: score vectors differ in length");
  if (budget > first.size()) throw std::invalid_argument("parallel_ranked: budget exceeds pool size");
  const auto r1 = ordinal_ranks(first);
  const auto r2 = ordinal_ranks(second);
  SelectionBatch order(first.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r1[a] + r2[a] < r1[b] + r2[b]; });
  order.resize(budget);
  return order;
}

CandidateIds hybrid_select(const HybridSpec& spec, const Selector& first, const Selector& second,
                           std::span<const std::size_t> pool, std::uint64_t seed) {
  if (spec.first_budget + spec.second_budget > pool.size()) throw std::invalid_argument("hybrid: pool smaller than b1 + b2");
  CandidateIds out = run_checked(first, pool, spec.first_budget, derive_seed(seed, {1}), "hybrid");
  std::unordered_set<std::size_t> picked(out.begin(), out.end());
  CandidateIds rest;
  rest.reserve(pool.size() - out.size());
  for (auto id : pool)
    if (!picked.count(id)) rest.push_back(id);
  const CandidateIds tail = run_checked(second, rest, spec.second_budget, derive_seed(seed, {2}), "hybrid");
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

void FeedbackState::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("feedback: epsilon must lie in (0, 0.5)");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("feedback: lambda must be > 0");
  if (window < 2) throw std::invalid_argument("feedback: window must be >= 2");
  if (!(beta >= epsilon && beta <= 1.0 - epsilon)) throw std::invalid_argument("feedback: beta outside [eps, 1 - eps]");
}

FeedbackState feedback_update(FeedbackState state, double new_loss) {
  state.validate();
  if (!std::isfinite(new_loss) || new_loss < 0.0) throw std::invalid_argument("feedback: loss must be finite and >= 0");
  state.losses.push_back(new_loss);

  const std::size_t t = state.losses.size();
  const std::size_t w = state.window;
  const std::size_t first = t > w ? t - w : 0;
  std::vector<double> smoothed;
  smoothed.reserve(t - first);
  for (std::size_t k = first; k < t; ++k) {
    const std::size_t lo = k + 1 > w ? k + 1 - w : 0;
    double acc = 0.0;
    for (std::size_t j = lo; j <= k; ++j) acc += state.losses[j];
    smoothed.push_back(acc / static_cast<double>(k + 1 - lo));
  }
  const auto [mn, mx] = std::minmax_element(smoothed.begin(), smoothed.end());
  state.scaled = *mx > *mn ? (smoothed.back() - *mn) / (*mx - *mn) : 0.0;
  state.beta = std::max(std::min(state.lambda * state.beta * std::exp(state.scaled), 1.0 - state.epsilon), state.epsilon);
  return state;
}

Phase feedback_decision(const FeedbackState& state) noexcept {
  return state.beta <= 0.5 ? Phase::Explore : Phase::Exploit;
}

RoutedSelection feedback_select(const FeedbackState& state, const Selector& explore, const Selector& exploit,
                                std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) {
  RoutedSelection out;
  out.phase = feedback_decision(state);
  out.batch = run_checked(out.phase == Phase::Explore ? explore : exploit, pool, budget, seed, "feedback");
  return out;
}

void AnnealingSchedule::validate() const {
  if (initial_exploration < 1 || first_exploit < 1 || explore < 1)
    throw std::invalid_argument("annealing: phase lengths must be >= 1");
  if (!(rate >= 1.0) || !std::isfinite(rate)) throw std::invalid_argument("annealing: rate must be >= 1");
}

std::size_t AnnealingSchedule::next_exploit_length(std::size_t len) const noexcept {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(len) + 1e-9));
}

Phase annealing_phase(const AnnealingSchedule& schedule, std::size_t t) {
  schedule.validate();
  if (t < 1) throw std::invalid_argument("annealing: rounds are 1-based");
  if (t <= schedule.initial_exploration) return Phase::Explore;
  std::size_t u = t - schedule.initial_exploration;
  std::size_t exploit = schedule.first_exploit;
  for (;;) {
    if (u <= exploit) return Phase::Exploit;
    u -= exploit;
    if (u <= schedule.explore) return Phase::Explore;
    u -= schedule.explore;
    exploit = schedule.next_exploit_length(exploit);
  }
}

Phase random_alternate(std::uint64_t seed, std::size_t t) noexcept {
  return (derive_seed(seed, {0x5eed, t}) >> 63) == 0 ? Phase::Explore : Phase::Exploit;
}

}  // namespace acqbench::agg
