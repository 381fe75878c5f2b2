#include "acqbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace acqbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string record_csv(const RunRecord& rec, bool wall_time) {
  std::ostringstream out;
  out << "round,n_labeled,test_accuracy,batch_loss_prev_model,strategy_tag,acq_ms,train_ms,n_infer\n";
  for (const auto& r : rec.rounds) {
    out << r.round << ',' << r.n_labeled << ',' << num(r.test_accuracy) << ',' << num(r.batch_loss_prev_model) << ','
        << csv_field(r.strategy_tag) << ',' << (wall_time ? num(r.acq_ms) : "") << ','
        << (wall_time ? num(r.train_ms) : "") << ',' << r.cost.total() << '\n';
  }
  return out.str();
}

json summary_json(const RunRecord& rec, bool wall_time) {
  std::size_t mc = 0, feat = 0;
  json rounds = json::array();
  for (const auto& r : rec.rounds) {
    mc += r.cost.mc_scoring;
    feat += r.cost.feature_extraction;
    json e{{"round", r.round},
           {"n_labeled", r.n_labeled},
           {"test_accuracy", r.test_accuracy},
           {"strategy_tag", r.strategy_tag},
           {"pool_size", r.pool_size},
           {"n_infer_mc_scoring", r.cost.mc_scoring},
           {"n_infer_feature_extraction", r.cost.feature_extraction}};
    e["batch_loss_prev_model"] = std::isnan(r.batch_loss_prev_model) ? json(nullptr) : json(r.batch_loss_prev_model);
    if (wall_time) {
      e["acq_ms"] = r.acq_ms;
      e["train_ms"] = r.train_ms;
    }
    rounds.push_back(std::move(e));
  }
  const auto& a = rec.final_model.arch;
  return json{
      {"strategy", rec.strategy},
      {"seed", rec.seed},
      {"final_accuracy", rec.final_accuracy()},
      {"final_n_labeled", rec.labeled.size()},
      {"n_infer_total", mc + feat},
      {"n_infer_mc_scoring", mc},
      {"n_infer_feature_extraction", feat},
      {"model", {{"input_dim", a.input_dim}, {"hidden", a.hidden}, {"classes", a.classes}, {"dropout", a.dropout}}},
      {"rounds", rounds},
  };
}

std::string selected_csv(const RunRecord& rec, const Dataset& train) {
  std::ostringstream out;
  out << "round,id,label";
  for (std::size_t j = 0; j < train.dim(); ++j) out << ",x" << j;
  out << '\n';
  for (const auto& r : rec.rounds) {
    for (std::size_t id : r.selected) {
      out << r.round << ',' << id << ',' << train.y.at(id);
      for (std::size_t j = 0; j < train.dim(); ++j) out << ',' << num(train.x(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(j)));
      out << '\n';
    }
  }
  return out.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

bool write_run(const fs::path& dir, const RunRecord& rec, const Dataset& train, bool wall_time) {
  const bool existed = fs::exists(dir / "record.csv");
  write_file_atomic(dir / "record.csv", record_csv(rec, wall_time));
  write_file_atomic(dir / "summary.json", summary_json(rec, wall_time).dump(2) + "\n");
  write_file_atomic(dir / "selected.csv", selected_csv(rec, train));
  return existed;
}

std::vector<double> read_accuracy_column(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
  const auto header = split_line(line);
  const auto col = std::find(header.begin(), header.end(), "test_accuracy");
  const auto rcol = std::find(header.begin(), header.end(), "round");
  if (col == header.end() || rcol == header.end())
    throw std::runtime_error("'" + path.string() + "' lacks round/test_accuracy columns");
  const std::size_t c = static_cast<std::size_t>(col - header.begin());
  const std::size_t rc = static_cast<std::size_t>(rcol - header.begin());
  std::vector<double> acc;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields");
    std::size_t round = 0;
    const auto& rf = fields[rc];
    if (std::from_chars(rf.data(), rf.data() + rf.size(), round).ec != std::errc{} || round != acc.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": rounds are not contiguous");
    double v = 0.0;
    const auto& f = fields[c];
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad test_accuracy '" + f + "'");
    acc.push_back(v);
  }
  return acc;
}

std::vector<eval::AccuracyTable> load_accuracy_tables(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) throw std::runtime_error("'" + results_dir.string() + "' is not a directory");
  std::vector<std::string> strategies;
  for (const auto& entry : fs::directory_iterator(results_dir))
    if (entry.is_directory()) strategies.push_back(entry.path().filename().string());
  std::sort(strategies.begin(), strategies.end());

  std::vector<eval::AccuracyTable> tables;
  for (const auto& name : strategies) {
    std::map<std::uint64_t, fs::path> seeds;
    for (const auto& entry : fs::directory_iterator(results_dir / name)) {
      if (!entry.is_directory() || !fs::exists(entry.path() / "record.csv")) continue;
      const std::string s = entry.path().filename().string();
      std::uint64_t seed = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) continue;
      seeds[seed] = entry.path() / "record.csv";
    }
    if (seeds.empty()) continue;
    eval::AccuracyTable t;
    t.strategy = name;
    std::size_t rounds = 0;
    bool first = true;
    for (const auto& [seed, path] : seeds) {
      const auto acc = read_accuracy_column(path);
      if (acc.size() < 2) throw std::runtime_error("'" + path.string() + "' has no acquisition rounds");
      if (first) {
        rounds = acc.size() - 1;
        t.acc.assign(rounds, {});
        first = false;
      } else if (acc.size() - 1 != rounds) {
        throw std::runtime_error("strategy '" + name + "': seed " + std::to_string(seed) + " has " +
                                 std::to_string(acc.size() - 1) + " rounds, expected " + std::to_string(rounds));
      }
      for (std::size_t r = 0; r < rounds; ++r) t.acc[r].push_back(acc[r + 1]);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string accuracy_table_csv(const eval::AccuracyTable& table, const std::vector<std::uint64_t>& seeds) {
  if (table.seeds() != seeds.size()) throw std::invalid_argument("accuracy_table_csv: seed count mismatch");
  std::ostringstream out;
  out << "round";
  for (auto s : seeds) out << ",seed_" << s;
  out << '\n';
  for (std::size_t r = 0; r < table.rounds(); ++r) {
    out << r + 1;
    for (double v : table.acc[r]) out << ',' << num(v);
    out << '\n';
  }
  return out.str();
}

std::string curve_csv(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw std::invalid_argument("curve_csv: no runs");
  const std::size_t rounds = runs.front().rounds.size();
  for (const auto& r : runs)
    if (r.rounds.size() != rounds) throw std::invalid_argument("curve_csv: runs differ in length");
  std::ostringstream out;
  out << "round,n_labeled,mean_accuracy,median_accuracy,min_accuracy,max_accuracy\n";
  for (std::size_t t = 0; t < rounds; ++t) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.rounds[t].test_accuracy);
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    out << t << ',' << runs.front().rounds[t].n_labeled << ',' << num(mean) << ',' << num(median(v)) << ','
        << num(*std::min_element(v.begin(), v.end())) << ',' << num(*std::max_element(v.begin(), v.end())) << '\n';
  }
  return out.str();
}

eval::AccuracyTable accuracy_table(const std::string& strategy, const std::vector<RunRecord>& runs) {
  eval::AccuracyTable t;
  t.strategy = strategy;
  if (runs.empty()) return t;
  const std::size_t rounds = runs.front().rounds.size();
  if (rounds < 2) throw std::invalid_argument("accuracy_table: runs have no acquisition rounds");
  t.acc.assign(rounds - 1, {});
  for (const auto& r : runs) {
    if (r.rounds.size() != rounds) throw std::invalid_argument("accuracy_table: runs differ in length");
    for (std::size_t i = 1; i < rounds; ++i) t.acc[i - 1].push_back(r.rounds[i].test_accuracy);
  }
  return t;
}

}  // namespace acqbench
