#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace acqbench::eval {

inline constexpr double kDefaultCritical = 2.776;

/// Accuracies of one strategy: acc[round][seed], R rounds by N seeds.
struct AccuracyTable {
  std::string strategy;
  std::vector<std::vector<double>> acc;

  std::size_t rounds() const noexcept { return acc.size(); }
  std::size_t seeds() const noexcept { return acc.empty() ? 0 : acc.front().size(); }
  void validate() const;
};

struct WinningRateMatrix {
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> win;  // win[i][j]: fraction of rounds where i beats j
  std::vector<double> row_average;       // mean over j != i
  double critical = kDefaultCritical;
};

/// Paired t statistic sqrt(N) * mean / sd of (a_i - a_j), sd with Bessel's correction.
/// A vanishing sd yields +inf, -inf or 0 by the sign of the mean.
double t_score(std::span<const double> a_i, std::span<const double> a_j);

/// Fraction of rounds whose paired t statistic exceeds `critical`.
double winning_rate(const AccuracyTable& a_i, const AccuracyTable& a_j, double critical = kDefaultCritical);

/// All pairwise winning rates, in the order the tables are given.
WinningRateMatrix heatmap(const std::vector<AccuracyTable>& tables, double critical = kDefaultCritical);

/// Header row of strategy names plus a trailing row_average column.
std::string heatmap_csv(const WinningRateMatrix& m);

/// Standalone SVG grid with one annotated cell per pair and the row average on the right.
std::string heatmap_svg(const WinningRateMatrix& m);

}  // namespace acqbench::eval
