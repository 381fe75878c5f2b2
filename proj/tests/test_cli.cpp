#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "acqbench/cli.hpp"
#include "acqbench/report.hpp"

using namespace acqbench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "acqbench_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "acqbench");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string config_text(const std::string& strategy, const fs::path& out) {
  return R"({
  "dataset": {"kind": "grid_toy", "params": {"cells": 4, "n_per_cell": 10, "spread": 0.1}},
  "model": {"hidden": 8, "dropout": 0.2},
  "train": {"epochs": 3},
  "mc": {"n_passes": 3},
  "al": {"M": 6, "T": 3, "b": 4},
  "strategy": )" + strategy + R"(,
  "seeds": [0, 1, 2],
  "output_dir": ")" + out.generic_string() + "\"\n}\n";
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// A record.csv whose test_accuracy column is `acc` (round 0 first).
std::string fake_record(const std::vector<double>& acc) {
  std::ostringstream out;
  out << "round,n_labeled,test_accuracy,batch_loss_prev_model,strategy_tag,acq_ms,train_ms,n_infer\n";
  for (std::size_t r = 0; r < acc.size(); ++r) out << r << ',' << 10 + r << ',' << acc[r] << ",,x,,,0\n";
  return out.str();
}

}  // namespace

TEST_CASE("run writes per-seed artifacts and is byte-for-byte repeatable") {
  const auto dir = fresh_dir("run");
  const auto cfg = dir / "cfg.json";
  write(cfg, config_text(R"({"kind": "bald"})", dir / "out"));
  REQUIRE(run_cli({"run", "--config", cfg.string()}) == 0);
  for (int s = 0; s < 3; ++s) {
    const auto seed_dir = dir / "out" / "bald" / std::to_string(s);
    CHECK(fs::exists(seed_dir / "record.csv"));
    CHECK(fs::exists(seed_dir / "summary.json"));
    CHECK(fs::exists(seed_dir / "selected.csv"));
    CHECK(count_lines(slurp(seed_dir / "selected.csv")) == 1 + 3 * 4);
    CHECK(count_lines(slurp(seed_dir / "record.csv")) == 1 + 4);
  }
  CHECK(fs::exists(dir / "out" / "bald" / "accuracy.csv"));
  const std::string rec = slurp(dir / "out" / "bald" / "1" / "record.csv");
  const std::string sel = slurp(dir / "out" / "bald" / "1" / "selected.csv");
  const std::string acc = slurp(dir / "out" / "bald" / "accuracy.csv");

  REQUIRE(run_cli({"run", "--config", cfg.string()}) == 0);
  CHECK(slurp(dir / "out" / "bald" / "1" / "record.csv") == rec);
  CHECK(slurp(dir / "out" / "bald" / "1" / "selected.csv") == sel);
  CHECK(slurp(dir / "out" / "bald" / "accuracy.csv") == acc);

  // Worker count does not change the output.
  REQUIRE(run_cli({"run", "--config", cfg.string(), "--jobs", "3"}) == 0);
  CHECK(slurp(dir / "out" / "bald" / "accuracy.csv") == acc);
}

TEST_CASE("schema violations exit non-zero") {
  const auto dir = fresh_dir("bad");
  const auto cfg = dir / "cfg.json";
  write(cfg, config_text(R"({"kind": "bald", "colour": 1})", dir / "out"));
  CHECK(run_cli({"run", "--config", cfg.string()}) == 2);
  CHECK_FALSE(fs::exists(dir / "out"));
  write(cfg, "{not json");
  CHECK(run_cli({"run", "--config", cfg.string()}) == 2);
  CHECK(run_cli({"run", "--config", (dir / "missing.json").string()}) == 2);
  CHECK(run_cli({"frobnicate"}) != 0);
}

TEST_CASE("overrides and seed flags") {
  const auto dir = fresh_dir("flags");
  const auto cfg = dir / "cfg.json";
  write(cfg, config_text(R"({"kind": "random"})", dir / "out"));
  REQUIRE(run_cli({"run", "--config", cfg.string(), "--seeds", "5-6", "--set", "al.b=2", "--out",
                   (dir / "elsewhere").string()}) == 0);
  CHECK(fs::exists(dir / "elsewhere" / "random" / "5" / "record.csv"));
  CHECK(fs::exists(dir / "elsewhere" / "random" / "6" / "record.csv"));
  CHECK_FALSE(fs::exists(dir / "elsewhere" / "random" / "0"));
  CHECK(count_lines(slurp(dir / "elsewhere" / "random" / "5" / "selected.csv")) == 1 + 3 * 2);
  CHECK(run_cli({"run", "--config", cfg.string(), "--set", "al.nope=1"}) == 2);
}

TEST_CASE("jobs resolution") {
  CHECK(cli::resolve_jobs(4) == 4);
  ::setenv("ACQBENCH_JOBS", "3", 1);
  CHECK(cli::resolve_jobs(0) == 3);
  ::setenv("ACQBENCH_JOBS", "zero", 1);
  CHECK(cli::resolve_jobs(0) == 1);
  ::unsetenv("ACQBENCH_JOBS");
  CHECK(cli::resolve_jobs(0) == 1);
}

TEST_CASE("compare: dominance, self-compare and the evaluation oracle") {
  const auto dir = fresh_dir("compare");
  for (int s = 0; s < 3; ++s) {
    const double base = 0.5 + 0.05 * s;
    write(dir / "dom" / "a_good" / std::to_string(s) / "record.csv", fake_record({0.4, base + 0.2, base + 0.3}));
    write(dir / "dom" / "b_bad" / std::to_string(s) / "record.csv", fake_record({0.4, base, base + 0.1}));
    write(dir / "self" / "x" / std::to_string(s) / "record.csv", fake_record({0.4, base, base + 0.1}));
    write(dir / "self" / "y" / std::to_string(s) / "record.csv", fake_record({0.4, base, base + 0.1}));
  }
  REQUIRE(run_cli({"compare", (dir / "dom").string()}) == 0);
  CHECK(slurp(dir / "dom" / "heatmap.csv") == "strategy,a_good,b_bad,row_average\na_good,0,1,1\nb_bad,0,0,0\n");
  CHECK(fs::exists(dir / "dom" / "heatmap.svg"));

  REQUIRE(run_cli({"compare", (dir / "self").string(), "--out", (dir / "self_out").string()}) == 0);
  CHECK(slurp(dir / "self_out" / "heatmap.csv") == "strategy,x,y,row_average\nx,0,0,0\ny,0,0,0\n");

  // Three strategies with mixed outcomes must match the library on the same tables.
  const std::vector<std::vector<double>> seeds_a{{0.4, 0.61, 0.70}, {0.4, 0.63, 0.69}, {0.4, 0.66, 0.74}},
      seeds_b{{0.4, 0.60, 0.71}, {0.4, 0.58, 0.70}, {0.4, 0.64, 0.69}},
      seeds_c{{0.4, 0.50, 0.60}, {0.4, 0.52, 0.61}, {0.4, 0.53, 0.65}};
  for (int s = 0; s < 3; ++s) {
    write(dir / "three" / "a" / std::to_string(s) / "record.csv", fake_record(seeds_a[s]));
    write(dir / "three" / "b" / std::to_string(s) / "record.csv", fake_record(seeds_b[s]));
    write(dir / "three" / "c" / std::to_string(s) / "record.csv", fake_record(seeds_c[s]));
  }
  REQUIRE(run_cli({"compare", (dir / "three").string(), "--critical", "1.5"}) == 0);
  const auto tables = load_accuracy_tables(dir / "three");
  REQUIRE(tables.size() == 3);
  CHECK(tables[0].acc[0] == std::vector<double>{0.61, 0.63, 0.66});
  CHECK(slurp(dir / "three" / "heatmap.csv") == eval::heatmap_csv(eval::heatmap(tables, 1.5)));

  CHECK(run_cli({"compare", (dir / "dom" / "a_good").string()}) != 0);
  write(dir / "bad" / "p" / "0" / "record.csv", fake_record({0.4, 0.5}));
  write(dir / "bad" / "q" / "0" / "record.csv", fake_record({0.4, 0.5, 0.6}));
  CHECK(run_cli({"compare", (dir / "bad").string()}) == 1);
}

TEST_CASE("ablate writes one subtree per value") {
  const auto dir = fresh_dir("ablate");
  const auto series = dir / "series.json";
  write(series, config_text(R"({"kind": "series", "constituents": [{"kind": "kcenters"}, {"kind": "bald"}]})",
                            dir / "out"));
  REQUIRE(run_cli({"ablate", "--config", series.string(), "kappa", "--values", "1,2,5", "--seeds", "0,1"}) == 0);
  for (const char* v : {"kappa_1", "kappa_2", "kappa_5"}) {
    CHECK(fs::exists(dir / "out" / v / "series-kcenters-bald" / "1" / "record.csv"));
    CHECK(fs::exists(dir / "out" / v / "curve.csv"));
  }
  CHECK(count_lines(slurp(dir / "out" / "ablation_kappa.csv")) == 4);

  const auto anneal = dir / "anneal.json";
  write(anneal, config_text(R"({"kind": "annealing", "constituents": [{"kind": "random"}, {"kind": "bald"}]})",
                            dir / "out2"));
  REQUIRE(run_cli({"ablate", "--config", anneal.string(), "rate", "--values", "1.0,1.5", "--seeds", "0,1"}) == 0);
  CHECK(fs::exists(dir / "out2" / "rate_1"));
  CHECK(fs::exists(dir / "out2" / "rate_1.5"));
  std::size_t subtrees = 0;
  for (const auto& e : fs::directory_iterator(dir / "out2")) subtrees += e.is_directory();
  CHECK(subtrees == 2);

  CHECK(run_cli({"ablate", "--config", anneal.string(), "kappa", "--values", "2"}) == 2);
  CHECK(run_cli({"ablate", "--config", series.string(), "rate", "--values", "2"}) == 2);
  CHECK(run_cli({"ablate", "--config", series.string(), "alpha", "--values", "2"}) == 2);
  CHECK(run_cli({"ablate", "--config", series.string(), "kappa", "--values", "0.5"}) == 2);
}

TEST_CASE("sweep runs several configs and writes a heatmap") {
  const auto dir = fresh_dir("sweep");
  const auto a = dir / "a.json", b = dir / "b.json";
  write(a, config_text(R"({"kind": "random"})", dir / "out"));
  write(b, config_text(R"({"kind": "kcenters"})", dir / "out"));
  REQUIRE(run_cli({"sweep", "--config", a.string(), b.string()}) == 0);
  CHECK(fs::exists(dir / "out" / "random" / "2" / "record.csv"));
  CHECK(fs::exists(dir / "out" / "kcenters" / "2" / "record.csv"));
  const std::string heat = slurp(dir / "out" / "heatmap.csv");
  CHECK(heat.rfind("strategy,kcenters,random,row_average\n", 0) == 0);
  CHECK(run_cli({"sweep", "--config", a.string(), a.string()}) == 2);
}

TEST_CASE("the toy config is the documented grid experiment") {
  const auto names = cli::toy_strategies();
  CHECK(names == std::vector<std::string>{"random", "least_confident", "kcenters"});
  for (const auto& n : names) {
    const auto cfg = cli::toy_config(n);
    CHECK(cfg.experiment.dataset.kind == "grid_toy");
    CHECK(cfg.experiment.rounds == 20);
    CHECK(cfg.experiment.budget == 10);
    CHECK(cfg.seeds.size() >= 10);
    CHECK_NOTHROW(cfg.experiment.validate());
  }
}
