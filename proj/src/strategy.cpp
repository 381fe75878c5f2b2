#include "acqbench/strategy.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

#include "acqbench/acquisition.hpp"
#include "acqbench/rng.hpp"

namespace acqbench {

Matrix RoundContext::rows(std::span<const std::size_t> ids) const {
  Matrix out(static_cast<Eigen::Index>(ids.size()), train_.x.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= train_.size()) throw std::out_of_range("candidate id out of range");
    out.row(static_cast<Eigen::Index>(r)) = train_.x.row(static_cast<Eigen::Index>(ids[r]));
  }
  return out;
}

ProbabilityTensor RoundContext::mc_probabilities(std::span<const std::size_t> ids, std::uint64_t seed) {
  MCConfig mc = mc_;
  mc.seed = seed;
  cost_.mc_scoring += mc.passes * ids.size();
  return mc_predict(model_, rows(ids), mc);
}

FeatureMatrix RoundContext::features_of(std::span<const std::size_t> ids) {
  cost_.feature_extraction += ids.size();
  return features(model_, rows(ids));
}

namespace {

constexpr std::array<std::string_view, 18> kKinds = {
    "random", "entropy", "least_confident", "margin", "mean_std", "bald", "power_bald", "kcenters", "badge",
    "facility_location", "disparity_min", "series", "parallel", "parallel_ranked", "hybrid", "feedback", "annealing",
    "random_alternate"};

constexpr std::array<std::string_view, 5> kScoringKinds = {"entropy", "least_confident", "margin", "mean_std", "bald"};

agg::CandidateIds to_ids(const SelectionBatch& positions, std::span<const std::size_t> pool) {
  agg::CandidateIds ids;
  ids.reserve(positions.size());
  for (auto p : positions) ids.push_back(pool[p]);
  return ids;
}

class RandomStrategy final : public Strategy {
 public:
  Selection select(RoundContext&, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    if (budget > pool.size()) throw std::invalid_argument("random: budget exceeds pool size");
    agg::CandidateIds ids(pool.begin(), pool.end());
    Rng rng(seed);
    // Partial Fisher-Yates: the first `budget` slots form a uniform sample without replacement.
    for (std::size_t i = 0; i < budget; ++i) std::swap(ids[i], ids[i + uniform_index(rng, ids.size() - i)]);
    ids.resize(budget);
    return {std::move(ids), name()};
  }
  std::string name() const override { return "random"; }
};

class ScoringStrategy final : public Strategy {
 public:
  explicit ScoringStrategy(std::string kind) : kind_(std::move(kind)) {}

  std::optional<ScoreVector> scores(RoundContext& ctx, std::span<const std::size_t> pool, std::uint64_t seed) override {
    const ProbabilityTensor t = ctx.mc_probabilities(pool, seed);
    if (kind_ == "entropy") return acq::entropy_scores(t);
    if (kind_ == "least_confident") return acq::least_confident_scores(t);
    if (kind_ == "margin") return acq::margin_scores(t);
    if (kind_ == "mean_std") return acq::mean_std_scores(t);
    return acq::bald_scores(t);
  }

  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    return {to_ids(acq::select_top_k(*scores(ctx, pool, seed), budget), pool), name()};
  }
  std::string name() const override { return kind_; }

 private:
  std::string kind_;
};

class PowerBaldStrategy final : public Strategy {
 public:
  explicit PowerBaldStrategy(double power) : power_(power) {}
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    const auto s = acq::bald_scores(ctx.mc_probabilities(pool, derive_seed(seed, {1})));
    return {to_ids(acq::select_power(s, budget, power_, derive_seed(seed, {2})), pool), name()};
  }
  std::string name() const override { return "power_bald"; }

 private:
  double power_;
};

class KCentersStrategy final : public Strategy {
 public:
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t) override {
    const FeatureMatrix pool_f = ctx.features_of(pool);
    const FeatureMatrix labeled_f = ctx.features_of(ctx.labeled());
    return {to_ids(acq::select_k_centers(pool_f, labeled_f, budget), pool), name()};
  }
  std::string name() const override { return "kcenters"; }
};

class BadgeStrategy final : public Strategy {
 public:
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    const ProbabilityTensor t = ctx.mc_probabilities(pool, derive_seed(seed, {1}));
    const FeatureMatrix f = ctx.features_of(pool);
    const auto e = acq::gradient_embeddings(t, f);
    return {to_ids(acq::select_kmeanspp(e, budget, derive_seed(seed, {2})), pool), name()};
  }
  std::string name() const override { return "badge"; }
};

class FacilityLocationStrategy final : public Strategy {
 public:
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t) override {
    return {to_ids(acq::select_facility_location(ctx.features_of(pool), budget), pool), name()};
  }
  std::string name() const override { return "facility_location"; }
};

// When run downstream of another stage the pool arrives in that stage's preference order, so
// position 0 is its top-ranked candidate.
class DisparityMinStrategy final : public Strategy {
 public:
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t) override {
    return {to_ids(acq::select_disparity_min(ctx.features_of(pool), budget, 0), pool), name()};
  }
  std::string name() const override { return "disparity_min"; }
};

using Children = std::vector<std::unique_ptr<Strategy>>;

// Binds a child strategy to the current round context and remembers the tag it reported.
agg::Selector bind(Strategy& child, RoundContext& ctx, std::string* tag) {
  return [&child, &ctx, tag](std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) {
    Selection s = child.select(ctx, pool, budget, seed);
    if (tag) *tag = std::move(s.tag);
    return std::move(s.ids);
  };
}

class CompositeStrategy : public Strategy {
 public:
  CompositeStrategy(std::string name, Children children) : name_(std::move(name)), children_(std::move(children)) {}
  void observe_batch_loss(double loss) override {
    for (auto& c : children_) c->observe_batch_loss(loss);
  }
  std::string name() const override { return name_; }

 protected:
  std::string name_;
  Children children_;
};

class SeriesStrategy final : public CompositeStrategy {
 public:
  SeriesStrategy(std::string name, Children children, std::vector<double> kappas)
      : CompositeStrategy(std::move(name), std::move(children)), kappas_(std::move(kappas)) {}
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    std::vector<agg::Selector> stages;
    for (auto& c : children_) stages.push_back(bind(*c, ctx, nullptr));
    return {agg::series_select(stages, kappas_, pool, budget, seed), name_};
  }

 private:
  std::vector<double> kappas_;
};

class ParallelStrategy final : public CompositeStrategy {
 public:
  using CompositeStrategy::CompositeStrategy;
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    return {agg::parallel_select(bind(*children_[0], ctx, nullptr), bind(*children_[1], ctx, nullptr), pool, budget, seed),
            name_};
  }
};

class ParallelRankedStrategy final : public CompositeStrategy {
 public:
  using CompositeStrategy::CompositeStrategy;
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    const auto s1 = children_[0]->scores(ctx, pool, derive_seed(seed, {1}));
    const auto s2 = children_[1]->scores(ctx, pool, derive_seed(seed, {2}));
    if (!s1 || !s2) throw std::logic_error("parallel_ranked: constituent does not produce scores");
    return {to_ids(agg::parallel_ranked_select(*s1, *s2, budget), pool), name_};
  }
};

class HybridStrategy final : public CompositeStrategy {
 public:
  HybridStrategy(std::string name, Children children, std::size_t first_budget)
      : CompositeStrategy(std::move(name), std::move(children)), first_budget_(first_budget) {}
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    if (first_budget_ > budget) throw std::invalid_argument("hybrid: first budget exceeds the round budget");
    const agg::HybridSpec spec{first_budget_, budget - first_budget_};
    return {agg::hybrid_select(spec, bind(*children_[0], ctx, nullptr), bind(*children_[1], ctx, nullptr), pool, seed),
            name_};
  }

 private:
  std::size_t first_budget_;
};

// Switching structures run exactly one constituent per round: [0] explores, [1] exploits.
class FeedbackStrategy final : public CompositeStrategy {
 public:
  FeedbackStrategy(std::string name, Children children, agg::FeedbackState initial)
      : CompositeStrategy(std::move(name), std::move(children)), state_(std::move(initial)) {
    state_.validate();
  }
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    std::string tag;
    auto routed = agg::feedback_select(state_, bind(*children_[0], ctx, &tag), bind(*children_[1], ctx, &tag), pool,
                                       budget, seed);
    return {std::move(routed.batch), std::string(agg::phase_name(routed.phase)) + ":" + tag};
  }
  void observe_batch_loss(double loss) override {
    state_ = agg::feedback_update(std::move(state_), loss);
    CompositeStrategy::observe_batch_loss(loss);
  }

 private:
  agg::FeedbackState state_;
};

class AnnealingStrategy final : public CompositeStrategy {
 public:
  AnnealingStrategy(std::string name, Children children, agg::AnnealingSchedule schedule)
      : CompositeStrategy(std::move(name), std::move(children)), schedule_(schedule) {
    schedule_.validate();
  }
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    const agg::Phase phase = agg::annealing_phase(schedule_, ctx.round());
    Selection s = children_[phase == agg::Phase::Explore ? 0 : 1]->select(ctx, pool, budget, seed);
    s.tag = std::string(agg::phase_name(phase)) + ":" + s.tag;
    return s;
  }

 private:
  agg::AnnealingSchedule schedule_;
};

class RandomAlternateStrategy final : public CompositeStrategy {
 public:
  using CompositeStrategy::CompositeStrategy;
  Selection select(RoundContext& ctx, std::span<const std::size_t> pool, std::size_t budget, std::uint64_t seed) override {
    const agg::Phase phase = agg::random_alternate(ctx.run_seed(), ctx.round());
    Selection s = children_[phase == agg::Phase::Explore ? 0 : 1]->select(ctx, pool, budget, seed);
    s.tag = std::string(agg::phase_name(phase)) + ":" + s.tag;
    return s;
  }
};

void require_constituents(const StrategySpec& spec, std::size_t min, std::size_t max) {
  const auto n = spec.constituents.size();
  if (n < min || n > max) {
    std::string want = min == max ? std::to_string(min) : std::to_string(min) + "+";
    throw std::invalid_argument("strategy '" + spec.kind + "' needs " + want + " constituents, got " + std::to_string(n));
  }
}

}  // namespace

std::span<const std::string_view> strategy_kinds() { return kKinds; }

bool is_scoring_kind(std::string_view kind) {
  return std::find(kScoringKinds.begin(), kScoringKinds.end(), kind) != kScoringKinds.end();
}

std::string StrategySpec::display_name() const {
  if (!name.empty()) return name;
  std::string out = kind;
  for (const auto& c : constituents) out += "-" + c.display_name();
  return out;
}

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec) {
  const std::string& k = spec.kind;
  if (std::find(kKinds.begin(), kKinds.end(), k) == kKinds.end()) throw std::invalid_argument("unknown strategy kind '" + k + "'");

  const bool leaf = k != "series" && k != "parallel" && k != "parallel_ranked" && k != "hybrid" && k != "feedback" &&
                    k != "annealing" && k != "random_alternate";
  if (leaf) {
    require_constituents(spec, 0, 0);
    if (k == "random") return std::make_unique<RandomStrategy>();
    if (is_scoring_kind(k)) return std::make_unique<ScoringStrategy>(k);
    if (k == "power_bald") return std::make_unique<PowerBaldStrategy>(spec.power.value_or(1.0));
    if (k == "kcenters") return std::make_unique<KCentersStrategy>();
    if (k == "badge") return std::make_unique<BadgeStrategy>();
    if (k == "facility_location") return std::make_unique<FacilityLocationStrategy>();
    return std::make_unique<DisparityMinStrategy>();
  }

  if (k == "series") require_constituents(spec, 2, SIZE_MAX);
  else require_constituents(spec, 2, 2);
  if (k == "parallel_ranked")
    for (const auto& c : spec.constituents)
      if (!is_scoring_kind(c.kind))
        throw std::invalid_argument("parallel_ranked: constituent '" + c.kind + "' does not produce per-sample scores");

  Children children;
  for (const auto& c : spec.constituents) children.push_back(make_strategy(c));
  std::string name = spec.display_name();

  if (k == "series") {
    std::vector<double> kappas = spec.kappa;
    if (kappas.empty()) kappas.assign(children.size(), 1.0);
    if (kappas.size() == children.size() - 1) kappas.push_back(1.0);
    if (kappas.size() != children.size())
      throw std::invalid_argument("series: expected " + std::to_string(children.size()) + " subsample factors");
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      if (!(kappas[i] >= 1.0)) throw std::invalid_argument("series: subsample factors must be >= 1");
      if (i > 0 && kappas[i] > kappas[i - 1]) throw std::invalid_argument("series: subsample factors must be non-increasing");
    }
    if (kappas.back() != 1.0) throw std::invalid_argument("series: the last subsample factor must be 1");
    return std::make_unique<SeriesStrategy>(std::move(name), std::move(children), std::move(kappas));
  }
  if (k == "parallel") return std::make_unique<ParallelStrategy>(std::move(name), std::move(children));
  if (k == "parallel_ranked") return std::make_unique<ParallelRankedStrategy>(std::move(name), std::move(children));
  if (k == "hybrid") {
    if (!spec.first_budget) throw std::invalid_argument("hybrid: parameter 'b1' is required");
    return std::make_unique<HybridStrategy>(std::move(name), std::move(children), *spec.first_budget);
  }
  if (k == "feedback") {
    agg::FeedbackState st;
    st.lambda = spec.lambda.value_or(st.lambda);
    st.epsilon = spec.epsilon.value_or(st.epsilon);
    st.window = spec.window.value_or(st.window);
    return std::make_unique<FeedbackStrategy>(std::move(name), std::move(children), std::move(st));
  }
  if (k == "annealing")
    return std::make_unique<AnnealingStrategy>(std::move(name), std::move(children), spec.schedule.value_or(agg::AnnealingSchedule{}));
  return std::make_unique<RandomAlternateStrategy>(std::move(name), std::move(children));
}

}  // namespace acqbench
