#include "acqbench/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace acqbench {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("config: unknown key '" + join(where, key) + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError("config: '" + where + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config: '" + where + "' must be finite");
  return v;
}

std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError("config: '" + where + "' must be an integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ConfigError("config: '" + where + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t get_seed(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  throw ConfigError("config: '" + where + "' must be a non-negative integer");
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError("config: '" + where + "' must be a string");
  return j.get<std::string>();
}

template <typename F>
void if_present(const json& obj, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it);
}

DatasetSpec parse_dataset(const json& j) {
  check_keys(j, "dataset", {"kind", "params"});
  DatasetSpec spec;
  if_present(j, "kind", [&](const json& v) { spec.kind = get_string(v, "dataset.kind"); });
  json params = j.value("params", json::object());
  const std::string where = "dataset.params";
  if (spec.kind == "grid_toy") {
    check_keys(params, where, {"cells", "n_per_cell", "spread", "seed", "test_fraction"});
  } else if (spec.kind == "blobs") {
    check_keys(params, where, {"n_per_class", "classes", "radius", "spread", "seed", "test_fraction"});
  } else if (spec.kind == "csv") {
    check_keys(params, where, {"path", "label", "seed", "test_fraction"});
    if (!params.contains("path")) throw ConfigError("config: '" + where + ".path' is required for csv datasets");
  } else {
    throw ConfigError("config: 'dataset.kind' must be one of grid_toy, blobs, csv (got '" + spec.kind + "')");
  }
  for (const auto& [key, value] : params.items()) {
    const std::string path = join(where, key);
    if (key == "seed") {
      spec.seed = get_seed(value, path);
    } else if (key == "test_fraction") {
      spec.test_fraction = get_number(value, path);
      if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw ConfigError("config: '" + path + "' must lie in (0, 1)");
    } else if (key == "path") {
      spec.path = get_string(value, path);
    } else if (key == "label") {
      if (value.is_string()) spec.label_column = value.get<std::string>();
      else spec.label_column = std::to_string(get_count(value, path));
    } else if (key == "spread" || key == "radius") {
      spec.numbers[key] = get_number(value, path);
    } else {
      spec.numbers[key] = static_cast<double>(get_count(value, path));
    }
  }
  return spec;
}

}  // namespace

StrategySpec parse_strategy(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "name", "params", "constituents"});
  StrategySpec spec;
  if (!j.contains("kind")) throw ConfigError("config: '" + join(where, "kind") + "' is required");
  spec.kind = get_string(j.at("kind"), join(where, "kind"));
  const auto kinds = strategy_kinds();
  if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
    throw ConfigError("config: '" + join(where, "kind") + "' has unknown value '" + spec.kind + "'");
  if_present(j, "name", [&](const json& v) { spec.name = get_string(v, join(where, "name")); });

  const json params = j.value("params", json::object());
  const std::string pw = join(where, "params");
  const std::string& k = spec.kind;
  if (k == "power_bald") {
    check_keys(params, pw, {"power"});
    if_present(params, "power", [&](const json& v) {
      spec.power = get_number(v, pw + ".power");
      if (*spec.power < 0.0) throw ConfigError("config: '" + pw + ".power' must be >= 0");
    });
  } else if (k == "series") {
    check_keys(params, pw, {"kappa"});
    if_present(params, "kappa", [&](const json& v) {
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) spec.kappa.push_back(get_number(v[i], pw + ".kappa[" + std::to_string(i) + "]"));
      } else {
        spec.kappa.push_back(get_number(v, pw + ".kappa"));
      }
    });
  } else if (k == "hybrid") {
    check_keys(params, pw, {"b1"});
    if_present(params, "b1", [&](const json& v) { spec.first_budget = get_count(v, pw + ".b1"); });
  } else if (k == "feedback") {
    check_keys(params, pw, {"lambda", "epsilon", "window"});
    if_present(params, "lambda", [&](const json& v) { spec.lambda = get_number(v, pw + ".lambda"); });
    if_present(params, "epsilon", [&](const json& v) { spec.epsilon = get_number(v, pw + ".epsilon"); });
    if_present(params, "window", [&](const json& v) { spec.window = get_count(v, pw + ".window"); });
  } else if (k == "annealing") {
    check_keys(params, pw, {"T_initial_exploration", "T_exploit_1", "T_explore", "rate"});
    agg::AnnealingSchedule s;
    if_present(params, "T_initial_exploration", [&](const json& v) { s.initial_exploration = get_count(v, pw + ".T_initial_exploration"); });
    if_present(params, "T_exploit_1", [&](const json& v) { s.first_exploit = get_count(v, pw + ".T_exploit_1"); });
    if_present(params, "T_explore", [&](const json& v) { s.explore = get_count(v, pw + ".T_explore"); });
    if_present(params, "rate", [&](const json& v) { s.rate = get_number(v, pw + ".rate"); });
    spec.schedule = s;
  } else {
    check_keys(params, pw, {});
  }

  if_present(j, "constituents", [&](const json& v) {
    if (!v.is_array()) throw ConfigError("config: '" + join(where, "constituents") + "' must be an array");
    for (std::size_t i = 0; i < v.size(); ++i)
      spec.constituents.push_back(parse_strategy(v[i], join(where, "constituents[" + std::to_string(i) + "]")));
  });

  // Structural checks (constituent counts, kappa ordering, ...) live in make_strategy.
  try {
    (void)make_strategy(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: '" + where + "': " + e.what());
  }
  return spec;
}

ConfigFile parse_config(const json& doc) {
  check_keys(doc, "", {"dataset", "model", "train", "mc", "al", "strategy", "seeds", "output_dir"});
  ConfigFile cfg;
  ExperimentConfig& e = cfg.experiment;
  if_present(doc, "dataset", [&](const json& v) { e.dataset = parse_dataset(v); });
  if_present(doc, "model", [&](const json& v) {
    check_keys(v, "model", {"hidden", "dropout"});
    if_present(v, "hidden", [&](const json& x) { e.arch.hidden = get_count(x, "model.hidden"); });
    if_present(v, "dropout", [&](const json& x) { e.arch.dropout = get_number(x, "model.dropout"); });
  });
  if_present(doc, "train", [&](const json& v) {
    check_keys(v, "train", {"lr", "epochs", "minibatch"});
    if_present(v, "lr", [&](const json& x) { e.train.learning_rate = get_number(x, "train.lr"); });
    if_present(v, "epochs", [&](const json& x) { e.train.epochs = get_count(x, "train.epochs"); });
    if_present(v, "minibatch", [&](const json& x) { e.train.minibatch = get_count(x, "train.minibatch"); });
  });
  if_present(doc, "mc", [&](const json& v) {
    check_keys(v, "mc", {"n_passes"});
    if_present(v, "n_passes", [&](const json& x) { e.mc.passes = get_count(x, "mc.n_passes"); });
  });
  if_present(doc, "al", [&](const json& v) {
    check_keys(v, "al", {"M", "T", "b", "pool_size"});
    if_present(v, "M", [&](const json& x) { e.initial_labeled = get_count(x, "al.M"); });
    if_present(v, "T", [&](const json& x) { e.rounds = get_count(x, "al.T"); });
    if_present(v, "b", [&](const json& x) { e.budget = get_count(x, "al.b"); });
    if_present(v, "pool_size", [&](const json& x) { e.pool_size = get_count(x, "al.pool_size"); });
  });
  if (!doc.contains("strategy")) throw ConfigError("config: 'strategy' is required");
  e.strategy = parse_strategy(doc.at("strategy"));
  if_present(doc, "seeds", [&](const json& v) {
    if (!v.is_array() || v.empty()) throw ConfigError("config: 'seeds' must be a non-empty array");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < v.size(); ++i) cfg.seeds.push_back(get_seed(v[i], "seeds[" + std::to_string(i) + "]"));
    if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
      throw ConfigError("config: 'seeds' must be distinct");
  });
  if_present(doc, "output_dir", [&](const json& v) { cfg.output_dir = get_string(v, "output_dir"); });

  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json strategy_to_json(const StrategySpec& spec) {
  json j;
  j["kind"] = spec.kind;
  if (!spec.name.empty()) j["name"] = spec.name;
  json params = json::object();
  if (spec.power) params["power"] = *spec.power;
  if (!spec.kappa.empty()) params["kappa"] = spec.kappa;
  if (spec.first_budget) params["b1"] = *spec.first_budget;
  if (spec.lambda) params["lambda"] = *spec.lambda;
  if (spec.epsilon) params["epsilon"] = *spec.epsilon;
  if (spec.window) params["window"] = *spec.window;
  if (spec.schedule) {
    params["T_initial_exploration"] = spec.schedule->initial_exploration;
    params["T_exploit_1"] = spec.schedule->first_exploit;
    params["T_explore"] = spec.schedule->explore;
    params["rate"] = spec.schedule->rate;
  }
  if (!params.empty()) j["params"] = params;
  if (!spec.constituents.empty()) {
    j["constituents"] = json::array();
    for (const auto& c : spec.constituents) j["constituents"].push_back(strategy_to_json(c));
  }
  return j;
}

json config_to_json(const ConfigFile& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  json params = json::object();
  for (const auto& [k, v] : e.dataset.numbers) {
    if (k == "spread" || k == "radius") params[k] = v;
    else params[k] = static_cast<std::size_t>(v);
  }
  if (!e.dataset.path.empty()) params["path"] = e.dataset.path;
  if (!e.dataset.label_column.empty()) params["label"] = e.dataset.label_column;
  params["seed"] = e.dataset.seed;
  params["test_fraction"] = e.dataset.test_fraction;
  return json{
      {"dataset", {{"kind", e.dataset.kind}, {"params", params}}},
      {"model", {{"hidden", e.arch.hidden}, {"dropout", e.arch.dropout}}},
      {"train", {{"lr", e.train.learning_rate}, {"epochs", e.train.epochs}, {"minibatch", e.train.minibatch}}},
      {"mc", {{"n_passes", e.mc.passes}}},
      {"al", {{"M", e.initial_labeled}, {"T", e.rounds}, {"b", e.budget}, {"pool_size", e.pool_size}}},
      {"strategy", strategy_to_json(e.strategy)},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir.string()},
  };
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::istringstream in(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(in, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + parts[i - 1] + "' is not an object");
    if (i + 1 == parts.size()) (*node)[parts[i]] = value;
    else node = &(*node)[parts[i]];
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(text);
  std::string item;
  auto parse = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || s.front() == '-') throw ConfigError("invalid seed '" + s + "' in '" + text + "'");
    return v;
  };
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(parse(item));
    } else {
      const auto lo = parse(item.substr(0, dash));
      const auto hi = parse(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("invalid seed range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) throw ConfigError("seeds must be distinct");
  return seeds;
}

}  // namespace acqbench
