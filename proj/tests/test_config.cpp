#include <doctest.h>

#include <string>

#include "acqbench/config.hpp"

using namespace acqbench;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "dataset": {"kind": "grid_toy", "params": {"cells": 4, "n_per_cell": 10, "spread": 0.1}},
    "al": {"M": 5, "T": 2, "b": 4},
    "strategy": {"kind": "bald"},
    "seeds": [0, 1]
  })");
}

std::string error_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a minimal document fills in defaults") {
  const auto cfg = parse_config(minimal());
  CHECK(cfg.experiment.dataset.kind == "grid_toy");
  CHECK(cfg.experiment.dataset.numbers.at("cells") == 4.0);
  CHECK(cfg.experiment.initial_labeled == 5);
  CHECK(cfg.experiment.rounds == 2);
  CHECK(cfg.experiment.budget == 4);
  CHECK(cfg.experiment.strategy.kind == "bald");
  CHECK(cfg.experiment.mc.passes == 5);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1});
  CHECK(cfg.output_dir == "results");
}

TEST_CASE("unknown keys are rejected with their path") {
  auto doc = minimal();
  doc["al"]["foo"] = 1;
  CHECK(error_of(doc).find("al.foo") != std::string::npos);

  doc = minimal();
  doc["extra"] = true;
  CHECK(error_of(doc).find("extra") != std::string::npos);

  doc = minimal();
  doc["dataset"]["params"]["n_per_class"] = 3;
  CHECK(error_of(doc).find("dataset.params.n_per_class") != std::string::npos);

  doc = minimal();
  doc["strategy"] = json::parse(R"({"kind": "series", "constituents": [{"kind": "kcenters"}, {"kind": "bald", "params": {"kappa": 2}}]})");
  CHECK(error_of(doc).find("strategy.constituents[1].params.kappa") != std::string::npos);
}

TEST_CASE("typed and structural errors") {
  auto doc = minimal();
  doc["al"]["b"] = -1;
  CHECK(error_of(doc).find("al.b") != std::string::npos);

  doc = minimal();
  doc["model"]["dropout"] = "high";
  CHECK(error_of(doc).find("model.dropout") != std::string::npos);

  doc = minimal();
  doc["strategy"]["kind"] = "nope";
  CHECK(error_of(doc).find("nope") != std::string::npos);

  doc = minimal();
  doc.erase("strategy");
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal();
  doc["seeds"] = json::array({1, 1});
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal();
  doc["seeds"] = json::array();
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal();
  doc["strategy"] = json::parse(R"({"kind": "parallel", "constituents": [{"kind": "bald"}]})");
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal();
  doc["strategy"] = json::parse(R"({"kind": "parallel_ranked", "constituents": [{"kind": "bald"}, {"kind": "kcenters"}]})");
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal();
  doc["dataset"] = json::parse(R"({"kind": "csv", "params": {}})");
  CHECK(error_of(doc).find("path") != std::string::npos);
}

TEST_CASE("composite strategies parse and round-trip") {
  auto doc = minimal();
  doc["strategy"] = json::parse(R"({
    "kind": "annealing", "name": "anneal",
    "params": {"T_initial_exploration": 3, "T_exploit_1": 2, "T_explore": 4, "rate": 1.25},
    "constituents": [
      {"kind": "series", "params": {"kappa": [2]}, "constituents": [{"kind": "kcenters"}, {"kind": "bald"}]},
      {"kind": "power_bald", "params": {"power": 2.0}}
    ]})");
  const auto cfg = parse_config(doc);
  const auto& s = cfg.experiment.strategy;
  CHECK(s.display_name() == "anneal");
  REQUIRE(s.schedule);
  CHECK(s.schedule->initial_exploration == 3);
  CHECK(s.schedule->rate == 1.25);
  REQUIRE(s.constituents.size() == 2);
  CHECK(s.constituents[0].kappa == std::vector<double>{2.0});
  CHECK(*s.constituents[1].power == 2.0);

  const auto again = parse_config(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
  CHECK(strategy_to_json(again.experiment.strategy) == strategy_to_json(s));
}

TEST_CASE("overrides and seed lists") {
  auto doc = minimal();
  apply_override(doc, "al.b=6");
  apply_override(doc, "strategy.kind=kcenters");
  apply_override(doc, "model.hidden=32");
  const auto cfg = parse_config(doc);
  CHECK(cfg.experiment.budget == 6);
  CHECK(cfg.experiment.strategy.kind == "kcenters");
  CHECK(cfg.experiment.arch.hidden == 32);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);

  CHECK(parse_seed_list("1-3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(parse_seed_list("5") == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("1,1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("x"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
}

TEST_CASE("config invariants are checked before any work") {
  auto doc = minimal();
  doc["al"]["M"] = 0;
  CHECK_FALSE(error_of(doc).empty());
  doc = minimal();
  doc["al"]["pool_size"] = 2;
  CHECK_FALSE(error_of(doc).empty());
  doc = minimal();
  doc["model"]["dropout"] = 1.0;
  CHECK_FALSE(error_of(doc).empty());
}
