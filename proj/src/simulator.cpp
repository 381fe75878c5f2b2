#include "acqbench/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "acqbench/rng.hpp"

namespace acqbench {

namespace {

double number_or(const DatasetSpec& spec, const std::string& key, double fallback) {
  auto it = spec.numbers.find(key);
  return it == spec.numbers.end() ? fallback : it->second;
}

std::size_t count_or(const DatasetSpec& spec, const std::string& key, std::size_t fallback) {
  const double v = number_or(spec, key, static_cast<double>(fallback));
  if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument("dataset parameter '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

ModelParams fit_round(const ExperimentConfig& cfg, const Architecture& arch, const Dataset& train,
                      const std::vector<std::size_t>& labeled, std::size_t round) {
  const Dataset d = train.subset(labeled);
  TrainConfig tc = cfg.train;
  tc.seed = stream_seed(cfg.seed, round, Purpose::Train);
  return acqbench::train(init_model(arch, stream_seed(cfg.seed, round, Purpose::ModelInit)), d.x, d.y, tc);
}

}  // namespace

std::pair<Dataset, Dataset> build_dataset(const DatasetSpec& spec) {
  Dataset full;
  if (spec.kind == "grid_toy") {
    full = make_grid_toy(count_or(spec, "cells", 8), count_or(spec, "n_per_cell", 40), number_or(spec, "spread", 0.12),
                         spec.seed);
  } else if (spec.kind == "blobs") {
    const std::size_t classes = count_or(spec, "classes", 3);
    full = make_blobs(count_or(spec, "n_per_class", 200), classes, circle_centers(classes, number_or(spec, "radius", 3.0)),
                      number_or(spec, "spread", 0.5), spec.seed);
  } else if (spec.kind == "csv") {
    ColumnRef col = spec.label_column;
    if (!spec.label_column.empty() &&
        std::all_of(spec.label_column.begin(), spec.label_column.end(), [](unsigned char c) { return std::isdigit(c); }))
      col = static_cast<std::size_t>(std::stoull(spec.label_column));
    full = load_csv(spec.path, col);
  } else {
    throw std::invalid_argument("unknown dataset kind '" + spec.kind + "'");
  }
  full.validate();
  return split(full, spec.test_fraction, spec.seed);
}

void ExperimentConfig::validate() const {
  Architecture shape = arch;  // input and class counts come from the dataset
  shape.input_dim = std::max<std::size_t>(shape.input_dim, 1);
  shape.classes = std::max<std::size_t>(shape.classes, 2);
  shape.validate();
  train.validate();
  mc.validate();
  if (initial_labeled < 1) throw std::invalid_argument("al.M must be >= 1");
  if (budget < 1) throw std::invalid_argument("al.b must be >= 1");
  if (rounds < 1) throw std::invalid_argument("al.T must be >= 1");
  if (pool_size != 0 && pool_size < budget) throw std::invalid_argument("al.pool_size must be >= al.b");
}

RunRecord run_experiment(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test) {
  cfg.validate();
  train.validate();
  test.validate();
  if (cfg.initial_labeled + cfg.rounds * cfg.budget > train.size())
    throw std::invalid_argument("M + T*b = " + std::to_string(cfg.initial_labeled + cfg.rounds * cfg.budget) +
                                " exceeds the training set size " + std::to_string(train.size()));
  Architecture arch = cfg.arch;
  arch.input_dim = train.dim();
  arch.classes = std::max(train.classes, test.classes);

  auto strategy = make_strategy(cfg.strategy);
  RunRecord record;
  record.strategy = cfg.strategy.display_name();
  record.seed = cfg.seed;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  {
    Rng rng(stream_seed(cfg.seed, 0, Purpose::InitialLabels));
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::size_t> labeled(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.initial_labeled));
  std::vector<std::size_t> unlabeled(order.begin() + static_cast<std::ptrdiff_t>(cfg.initial_labeled), order.end());
  std::sort(unlabeled.begin(), unlabeled.end());

  auto t0 = std::chrono::steady_clock::now();
  ModelParams model = fit_round(cfg, arch, train, labeled, 0);
  RoundEntry first;
  first.round = 0;
  first.n_labeled = labeled.size();
  first.train_ms = elapsed_ms(t0);
  first.test_accuracy = accuracy(model, test.x, test.y);
  first.batch_loss_prev_model = std::numeric_limits<double>::quiet_NaN();
  first.strategy_tag = "initial";
  record.rounds.push_back(std::move(first));

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    RoundEntry entry;
    entry.round = t;

    std::vector<std::size_t> pool;
    if (cfg.pool_size == 0 || unlabeled.size() <= cfg.pool_size) {
      pool = unlabeled;
    } else {
      pool = unlabeled;
      Rng rng(stream_seed(cfg.seed, t, Purpose::PoolDraw));
      for (std::size_t i = 0; i < cfg.pool_size; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
      pool.resize(cfg.pool_size);
      std::sort(pool.begin(), pool.end());
    }
    entry.pool_size = pool.size();

    t0 = std::chrono::steady_clock::now();
    RoundContext ctx(model, train, labeled, cfg.mc, t, cfg.seed);
    Selection sel;
    try {
      sel = strategy->select(ctx, pool, cfg.budget, stream_seed(cfg.seed, t, Purpose::Acquire));
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(t) + ": strategy '" + record.strategy + "' failed: " + e.what());
    }
    entry.acq_ms = elapsed_ms(t0);
    entry.cost = ctx.cost();
    entry.strategy_tag = sel.tag;

    // Invariants: exactly b distinct ids, all from the pool.
    if (sel.ids.size() != cfg.budget)
      throw std::runtime_error("round " + std::to_string(t) + ": strategy returned " + std::to_string(sel.ids.size()) +
                               " samples, expected " + std::to_string(cfg.budget));
    std::set<std::size_t> in_pool(pool.begin(), pool.end());
    std::set<std::size_t> seen;
    for (auto id : sel.ids)
      if (!in_pool.count(id) || !seen.insert(id).second)
        throw std::runtime_error("round " + std::to_string(t) + ": strategy returned an invalid or repeated id");

    const Dataset batch = train.subset(sel.ids);
    const std::vector<int> labels = oracle_label(train, sel.ids);
    entry.batch_loss_prev_model = mean_cross_entropy(model, batch.x, labels);
    strategy->observe_batch_loss(entry.batch_loss_prev_model);

    labeled.insert(labeled.end(), sel.ids.begin(), sel.ids.end());
    std::vector<std::size_t> remaining;
    remaining.reserve(unlabeled.size() - sel.ids.size());
    std::set_difference(unlabeled.begin(), unlabeled.end(), seen.begin(), seen.end(), std::back_inserter(remaining));
    unlabeled = std::move(remaining);
    entry.selected = std::move(sel.ids);

    t0 = std::chrono::steady_clock::now();
    model = fit_round(cfg, arch, train, labeled, t);
    entry.train_ms = elapsed_ms(t0);
    entry.n_labeled = labeled.size();
    entry.test_accuracy = accuracy(model, test.x, test.y);
    record.rounds.push_back(std::move(entry));
  }
  record.labeled = std::move(labeled);
  record.final_model = std::move(model);
  return record;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  const auto [train, test] = build_dataset(cfg.dataset);
  return run_experiment(cfg, train, test);
}

std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw std::invalid_argument("sweep: seeds must be distinct");
  cfg.validate();
  const auto [train, test] = build_dataset(cfg.dataset);
  std::vector<RunRecord> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        ExperimentConfig c = cfg;
        c.seed = seeds[i];
        out[i] = run_experiment(c, train, test);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, seeds.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace acqbench
