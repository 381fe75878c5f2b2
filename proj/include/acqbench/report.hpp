#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "acqbench/evaluation.hpp"
#include "acqbench/simulator.hpp"

namespace acqbench {

/// One line per round. The timing columns stay empty unless `wall_time` is set, which keeps
/// repeated runs byte-identical.
std::string record_csv(const RunRecord& rec, bool wall_time = false);

/// Final accuracy, cumulative cost, per-round tags and the model shape.
nlohmann::json summary_json(const RunRecord& rec, bool wall_time = false);

/// round,id,label,x0..x{d-1}: one row per acquired point (rounds * b rows).
std::string selected_csv(const RunRecord& rec, const Dataset& train);

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes record.csv, summary.json and selected.csv into `dir`. Returns true if record.csv
/// already existed and was replaced.
bool write_run(const std::filesystem::path& dir, const RunRecord& rec, const Dataset& train, bool wall_time = false);

/// The test_accuracy column of a record.csv, indexed by round.
std::vector<double> read_accuracy_column(const std::filesystem::path& record_csv);

/// Loads <results>/<strategy>/<seed>/record.csv into one table per strategy, strategies sorted
/// lexicographically and seeds numerically. Round 0 (the seed set) is left out.
std::vector<eval::AccuracyTable> load_accuracy_tables(const std::filesystem::path& results_dir);

/// round,<seed>,<seed>,... with one row per acquisition round.
std::string accuracy_table_csv(const eval::AccuracyTable& table, const std::vector<std::uint64_t>& seeds);

/// round,n_labeled,mean_accuracy,median_accuracy,min_accuracy,max_accuracy over the given runs.
std::string curve_csv(const std::vector<RunRecord>& runs);

/// Accuracy table from in-memory runs (rounds 1..T), seeds in the order given.
eval::AccuracyTable accuracy_table(const std::string& strategy, const std::vector<RunRecord>& runs);

}  // namespace acqbench
