#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "acqbench/tensor.hpp"

namespace acqbench {

struct Dataset {
  Matrix x;            // [N, d]
  std::vector<int> y;  // [N], in [0, classes)
  std::size_t classes = 0;
  std::string name;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
  void validate() const;
  /// Rows in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// cells x cells checkerboard of isotropic Gaussian clusters at unit pitch, centred on the origin.
/// Cell (i, j) has class (i + j) mod 2.
Dataset make_grid_toy(std::size_t cells_per_side, std::size_t n_per_cell, double spread, std::uint64_t seed);

/// One isotropic Gaussian cluster per row of `centers` ([classes, d]).
Dataset make_blobs(std::size_t n_per_class, std::size_t classes, const Matrix& centers, double spread,
                   std::uint64_t seed);

/// Evenly spaced 2-D centres on a circle, for blob datasets without explicit centres.
Matrix circle_centers(std::size_t classes, double radius);

using ColumnRef = std::variant<std::size_t, std::string>;

/// Numeric CSV with an optional header line. Labels are integers remapped to [0, C) in
/// ascending order of their original value.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column);

/// Seeded shuffle; the first ceil(N * (1 - test_fraction)) rows go to train.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Ground-truth labels for the requested rows (the simulated annotator).
std::vector<int> oracle_label(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace acqbench
