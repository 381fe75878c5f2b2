#include "acqbench/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "acqbench/rng.hpp"

namespace acqbench {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

void Dataset::validate() const {
  if (y.empty()) throw std::invalid_argument("dataset '" + name + "' is empty");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw std::invalid_argument("dataset '" + name + "': feature/label row mismatch");
  if (!x.allFinite()) throw std::invalid_argument("dataset '" + name + "' has non-finite features");
  for (int label : y)
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw std::invalid_argument("dataset '" + name + "' has a label outside [0, classes)");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.classes = classes;
  out.name = name;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw std::out_of_range("dataset row " + std::to_string(rows[r]) + " out of range");
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
    out.y[r] = y[rows[r]];
  }
  return out;
}

Dataset make_grid_toy(std::size_t cells_per_side, std::size_t n_per_cell, double spread, std::uint64_t seed) {
  if (cells_per_side < 2) throw std::invalid_argument("grid toy: need at least 2 cells per side");
  if (n_per_cell < 1) throw std::invalid_argument("grid toy: need at least 1 point per cell");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw std::invalid_argument("grid toy: spread must be > 0");

  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::Dataset), 0x9e1d}));
  std::normal_distribution<double> noise(0.0, spread);
  const double offset = (static_cast<double>(cells_per_side) - 1.0) / 2.0;
  Dataset ds;
  ds.name = "grid_toy";
  ds.classes = 2;
  const std::size_t n = cells_per_side * cells_per_side * n_per_cell;
  ds.x.resize(static_cast<Eigen::Index>(n), 2);
  ds.y.resize(n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < cells_per_side; ++i)
    for (std::size_t j = 0; j < cells_per_side; ++j)
      for (std::size_t k = 0; k < n_per_cell; ++k, ++row) {
        ds.x(static_cast<Eigen::Index>(row), 0) = static_cast<double>(i) - offset + noise(rng);
        ds.x(static_cast<Eigen::Index>(row), 1) = static_cast<double>(j) - offset + noise(rng);
        ds.y[row] = static_cast<int>((i + j) % 2);
      }
  return ds;
}

Matrix circle_centers(std::size_t classes, double radius) {
  Matrix c(static_cast<Eigen::Index>(classes), 2);
  for (std::size_t k = 0; k < classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(classes);
    c(static_cast<Eigen::Index>(k), 0) = radius * std::cos(angle);
    c(static_cast<Eigen::Index>(k), 1) = radius * std::sin(angle);
  }
  return c;
}

Dataset make_blobs(std::size_t n_per_class, std::size_t classes, const Matrix& centers, double spread,
                   std::uint64_t seed) {
  if (classes < 2) throw std::invalid_argument("blobs: need at least 2 classes");
  if (static_cast<std::size_t>(centers.rows()) != classes) throw std::invalid_argument("blobs: one centre per class required");
  if (centers.cols() < 1) throw std::invalid_argument("blobs: centres need at least one dimension");
  if (n_per_class < 1) throw std::invalid_argument("blobs: need at least 1 point per class");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw std::invalid_argument("blobs: spread must be > 0");
  for (Eigen::Index a = 0; a < centers.rows(); ++a)
    for (Eigen::Index b = a + 1; b < centers.rows(); ++b)
      if (centers.row(a) == centers.row(b)) throw std::invalid_argument("blobs: centres must be pairwise distinct");

  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::Dataset), 0xb10b}));
  std::normal_distribution<double> noise(0.0, spread);
  Dataset ds;
  ds.name = "blobs";
  ds.classes = classes;
  ds.x.resize(static_cast<Eigen::Index>(n_per_class * classes), centers.cols());
  ds.y.resize(n_per_class * classes);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t k = 0; k < n_per_class; ++k, ++row) {
      for (Eigen::Index d = 0; d < centers.cols(); ++d)
        ds.x(static_cast<Eigen::Index>(row), d) = centers(static_cast<Eigen::Index>(c), d) + noise(rng);
      ds.y[row] = static_cast<int>(c);
    }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file '" + path.string() + "'");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw std::runtime_error("CSV file '" + path.string() + "' has no rows");

  // A first line with any non-numeric cell is a header.
  std::vector<std::string> header;
  bool has_header = false;
  for (const auto& cell : rows.front()) {
    double v;
    if (!parse_double(cell, v)) has_header = true;
  }
  if (has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    line_numbers.erase(line_numbers.begin());
  }
  if (rows.empty()) throw std::runtime_error("CSV file '" + path.string() + "' has a header but no data rows");

  const std::size_t width = has_header ? header.size() : rows.front().size();
  if (width < 2) throw std::runtime_error("CSV file '" + path.string() + "' needs a label column and at least one feature");
  std::size_t label_idx = 0;
  if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
    label_idx = *idx;
  } else {
    const auto& want = std::get<std::string>(label_column);
    if (!has_header) throw std::runtime_error("label column '" + want + "' given by name but the CSV has no header");
    auto it = std::find(header.begin(), header.end(), want);
    if (it == header.end()) throw std::runtime_error("label column '" + want + "' not found in CSV header");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  if (label_idx >= width) throw std::runtime_error("label column index " + std::to_string(label_idx) + " out of range");

  Dataset ds;
  ds.name = path.stem().string();
  ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  std::vector<long long> raw(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != width)
      throw std::runtime_error("CSV line " + std::to_string(line_numbers[r]) + ": expected " + std::to_string(width) +
                               " columns, found " + std::to_string(cells.size()));
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double v;
      if (!parse_double(cells[c], v))
        throw std::runtime_error("CSV line " + std::to_string(line_numbers[r]) + ", column " + std::to_string(c + 1) +
                                 ": non-numeric value '" + cells[c] + "'");
      if (c == label_idx) {
        if (v != std::floor(v))
          throw std::runtime_error("CSV line " + std::to_string(line_numbers[r]) + ", column " + std::to_string(c + 1) +
                                   ": label '" + cells[c] + "' is not an integer");
        raw[r] = static_cast<long long>(v);
      } else {
        ds.x(static_cast<Eigen::Index>(r), feature++) = v;
      }
    }
  }
  std::map<long long, int> remap;
  for (auto v : raw) remap.emplace(v, 0);
  int next = 0;
  for (auto& [k, v] : remap) v = next++;
  ds.classes = remap.size();
  ds.y.resize(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) ds.y[r] = remap[raw[r]];
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("split: test fraction must lie in (0, 1)");
  const std::size_t n = ds.size();
  const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 - test_fraction) - 1e-9));
  if (n_train == 0 || n_train >= n) throw std::invalid_argument("split: fraction leaves one side empty");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::Split)}));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

std::vector<int> oracle_label(const Dataset& ds, const std::vector<std::size_t>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= ds.size()) throw std::out_of_range("oracle_label: index " + std::to_string(i) + " out of range");
    out.push_back(ds.y[i]);
  }
  return out;
}

}  // namespace acqbench
