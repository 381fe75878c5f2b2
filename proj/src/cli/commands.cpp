#include "acqbench/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "acqbench/report.hpp"

namespace acqbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string checked_name(const StrategySpec& spec) {
  const std::string name = spec.display_name();
  if (name.empty() || name == "." || name == ".." || name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("config: 'strategy.name' must be usable as a directory name (got '" + name + "')");
  return name;
}

// Runs every seed of one config and writes output_dir/<strategy>/<seed>/.
std::vector<RunRecord> run_and_write(const ConfigFile& cfg, const fs::path& out_dir, const Options& opt) {
  const std::string name = checked_name(cfg.experiment.strategy);
  const auto [train, test] = build_dataset(cfg.experiment.dataset);
  std::vector<RunRecord> runs = sweep(cfg.experiment, cfg.seeds, resolve_jobs(opt.jobs));
  for (const auto& rec : runs) {
    const fs::path dir = out_dir / name / std::to_string(rec.seed);
    if (write_run(dir, rec, train, opt.wall_time)) std::cerr << "warning: overwrote " << dir.string() << "\n";
    std::cout << name << " seed " << rec.seed << ": final accuracy " << format_value(rec.final_accuracy()) << "\n";
  }
  write_file_atomic(out_dir / name / "accuracy.csv", accuracy_table_csv(accuracy_table(name, runs), cfg.seeds));
  write_file_atomic(out_dir / name / "config.json", config_to_json(cfg).dump(2) + "\n");
  return runs;
}

fs::path output_root(const ConfigFile& cfg, const Options& opt) { return opt.out.empty() ? cfg.output_dir : opt.out; }

void write_heatmap(const fs::path& dir, const eval::WinningRateMatrix& m) {
  write_file_atomic(dir / "heatmap.csv", eval::heatmap_csv(m));
  write_file_atomic(dir / "heatmap.svg", eval::heatmap_svg(m));
}

}  // namespace

std::size_t resolve_jobs(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ACQBENCH_JOBS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring ACQBENCH_JOBS='" << env << "'\n";
  }
  return 1;
}

ConfigFile load(const fs::path& config, const Options& opt) {
  std::ifstream in(config);
  if (!in) throw ConfigError("cannot open config '" + config.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + config.string() + "' is not valid JSON: " + e.what());
  }
  for (const auto& o : opt.overrides) apply_override(doc, o);
  ConfigFile cfg = parse_config(doc);
  if (!opt.seeds.empty()) cfg.seeds = parse_seed_list(opt.seeds);
  return cfg;
}

void cmd_run(const fs::path& config, const Options& opt) {
  const ConfigFile cfg = load(config, opt);
  run_and_write(cfg, output_root(cfg, opt), opt);
}

void cmd_sweep(const std::vector<fs::path>& configs, const Options& opt) {
  std::vector<ConfigFile> cfgs;
  std::set<std::string> names;
  for (const auto& c : configs) {
    cfgs.push_back(load(c, opt));
    if (!names.insert(checked_name(cfgs.back().experiment.strategy)).second)
      throw ConfigError("sweep: strategy name '" + cfgs.back().experiment.strategy.display_name() +
                        "' appears twice; set strategy.name to tell them apart");
  }
  std::set<fs::path> roots;
  for (const auto& cfg : cfgs) {
    run_and_write(cfg, output_root(cfg, opt), opt);
    roots.insert(output_root(cfg, opt));
  }
  for (const auto& root : roots) {
    const auto tables = load_accuracy_tables(root);
    if (tables.size() >= 2) {
      write_heatmap(root, eval::heatmap(tables, opt.critical));
      std::cout << "heatmap written to " << (root / "heatmap.csv").string() << "\n";
    }
  }
}

void cmd_compare(const fs::path& results_dir, const Options& opt) {
  const auto tables = load_accuracy_tables(results_dir);
  if (tables.size() < 2)
    throw std::runtime_error("compare: need at least 2 strategies under '" + results_dir.string() + "', found " +
                             std::to_string(tables.size()));
  const auto m = eval::heatmap(tables, opt.critical);
  const fs::path dest = opt.out.empty() ? results_dir : opt.out;
  write_heatmap(dest, m);
  for (std::size_t i = 0; i < m.strategies.size(); ++i)
    std::cout << m.strategies[i] << ": row average " << format_value(m.row_average[i]) << "\n";
}

void cmd_ablate(const fs::path& config, const std::string& parameter, const std::vector<double>& values,
                const Options& opt) {
  const ConfigFile base = load(config, opt);
  const std::string& kind = base.experiment.strategy.kind;
  if (parameter == "kappa") {
    if (kind != "series") throw ConfigError("ablate: kappa needs a series strategy, got '" + kind + "'");
  } else if (parameter == "rate") {
    if (kind != "annealing") throw ConfigError("ablate: rate needs an annealing strategy, got '" + kind + "'");
  } else {
    throw ConfigError("ablate: parameter must be kappa or rate, got '" + parameter + "'");
  }
  if (values.empty()) throw ConfigError("ablate: no values given");

  // Validate every variant before running any of them.
  std::vector<ConfigFile> variants;
  for (double v : values) {
    ConfigFile cfg = base;
    StrategySpec& s = cfg.experiment.strategy;
    if (parameter == "kappa") {
      s.kappa.assign(s.constituents.size() - 1, v);
    } else {
      agg::AnnealingSchedule sched = s.schedule.value_or(agg::AnnealingSchedule{});
      sched.rate = v;
      s.schedule = sched;
    }
    try {
      (void)make_strategy(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("ablate: " + parameter + "=" + format_value(v) + ": " + e.what());
    }
    variants.push_back(std::move(cfg));
  }

  const fs::path root = output_root(base, opt);
  std::ostringstream summary;
  summary << "value,final_mean_accuracy,mean_n_infer_per_round\n";
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const fs::path dir = root / (parameter + "_" + format_value(values[i]));
    const auto runs = run_and_write(variants[i], dir, opt);
    write_file_atomic(dir / "curve.csv", curve_csv(runs));
    double acc = 0.0, infer = 0.0;
    std::size_t rounds = 0;
    for (const auto& r : runs) {
      acc += r.final_accuracy();
      for (std::size_t t = 1; t < r.rounds.size(); ++t, ++rounds) infer += static_cast<double>(r.rounds[t].cost.total());
    }
    summary << format_value(values[i]) << ',' << format_value(acc / static_cast<double>(runs.size())) << ','
            << format_value(rounds ? infer / static_cast<double>(rounds) : 0.0) << '\n';
  }
  write_file_atomic(root / ("ablation_" + parameter + ".csv"), summary.str());
}

std::vector<std::string> toy_strategies() { return {"random", "least_confident", "kcenters"}; }

ConfigFile toy_config(const std::string& strategy_kind) {
  ConfigFile cfg;
  ExperimentConfig& e = cfg.experiment;
  e.dataset.kind = "grid_toy";
  e.dataset.numbers = {{"cells", 8.0}, {"n_per_cell", 30.0}, {"spread", 0.02}};
  e.dataset.test_fraction = 0.3;
  e.dataset.seed = 0;
  e.arch.hidden = 64;
  e.arch.dropout = 0.05;
  e.train.learning_rate = 0.01;
  e.train.epochs = 1500;
  e.train.minibatch = 4;
  e.mc.passes = 5;
  e.initial_labeled = 10;
  e.rounds = 20;
  e.budget = 10;
  e.pool_size = 0;
  e.strategy.kind = strategy_kind;
  cfg.seeds.clear();
  for (std::uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
  cfg.output_dir = "results/toy";
  return cfg;
}

void cmd_toy(const Options& opt) {
  const fs::path root = opt.out.empty() ? fs::path("results/toy") : opt.out;
  std::vector<eval::AccuracyTable> tables;
  for (const auto& kind : toy_strategies()) {
    ConfigFile cfg = toy_config(kind);
    if (!opt.overrides.empty()) {
      json doc = config_to_json(cfg);
      for (const auto& o : opt.overrides) apply_override(doc, o);
      cfg = parse_config(doc);
    }
    if (!opt.seeds.empty()) cfg.seeds = parse_seed_list(opt.seeds);
    if (cfg.seeds.size() < 2) throw ConfigError("toy: needs at least 2 seeds");
    const auto runs = run_and_write(cfg, root, opt);
    tables.push_back(accuracy_table(cfg.experiment.strategy.display_name(), runs));
  }
  std::sort(tables.begin(), tables.end(), [](const auto& a, const auto& b) { return a.strategy < b.strategy; });
  write_heatmap(root, eval::heatmap(tables, opt.critical));
  std::cout << "toy results written to " << root.string() << "\n";
}

int main(int argc, char** argv) {
  CLI::App app{"Batch active-learning benchmark"};
  app.require_subcommand(1);
  Options opt;
  std::size_t jobs = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seeds", opt.seeds, "Seed list such as 0-9 or 1,4,7");
    cmd->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    cmd->add_option("--jobs", jobs, "Worker threads (default: ACQBENCH_JOBS or 1)");
    cmd->add_option("--set", opt.overrides, "Override a config key, e.g. al.b=20")->take_all();
    cmd->add_flag("--wall-time", opt.wall_time, "Record acquisition and training wall times");
    cmd->add_option("--critical", opt.critical, "Critical t value for winning rates");
  };

  fs::path config;
  auto* run = app.add_subcommand("run", "Run one config over its seeds");
  run->add_option("--config", config, "Config file")->required();
  add_common(run);

  std::vector<fs::path> configs;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run several configs over the same seeds, then compare");
  sweep_cmd->add_option("--config", configs, "Config files")->required()->take_all();
  add_common(sweep_cmd);

  fs::path results;
  auto* compare = app.add_subcommand("compare", "Winning-rate heatmap over a results directory");
  compare->add_option("results", results, "Results directory")->required();
  add_common(compare);

  std::string parameter;
  std::vector<double> values;
  auto* ablate = app.add_subcommand("ablate", "Sweep kappa (series) or rate (annealing)");
  ablate->add_option("--config", config, "Config file")->required();
  ablate->add_option("parameter", parameter, "kappa or rate")->required();
  ablate->add_option("--values", values, "Values to try")->required()->delimiter(',');
  add_common(ablate);

  auto* toy = app.add_subcommand("toy", "Grid-toy comparison of random, least confident and K-Centers");
  add_common(toy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  opt.jobs = jobs;

  try {
    if (*run) cmd_run(config, opt);
    else if (*sweep_cmd) cmd_sweep(configs, opt);
    else if (*compare) cmd_compare(results, opt);
    else if (*ablate) cmd_ablate(config, parameter, values, opt);
    else if (*toy) cmd_toy(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace acqbench::cli
