#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace acqbench {

/// Row-major in the sense of "one row per sample"; storage is Eigen's default.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Last-hidden-layer activations, one row per sample.
using FeatureMatrix = Matrix;
/// Hypothetical last-layer gradients, one row per sample, C*H columns (class-major).
using GradientEmbeddingMatrix = Matrix;

using ScoreVector = std::vector<double>;
/// Ordered, distinct candidate positions.
using SelectionBatch = std::vector<std::size_t>;

/// Stacked stochastic forward passes: passes() matrices of shape [samples, classes].
class ProbabilityTensor {
 public:
  static constexpr double kRowTolerance = 1e-9;

  ProbabilityTensor() = default;
  /// Validates that every row of every pass lies on the probability simplex.
  explicit ProbabilityTensor(std::vector<Matrix> passes);

  std::size_t passes() const noexcept { return passes_.size(); }
  std::size_t samples() const noexcept { return passes_.empty() ? 0 : static_cast<std::size_t>(passes_[0].rows()); }
  std::size_t classes() const noexcept { return passes_.empty() ? 0 : static_cast<std::size_t>(passes_[0].cols()); }

  const Matrix& pass(std::size_t k) const { return passes_.at(k); }
  double operator()(std::size_t k, std::size_t i, std::size_t c) const {
    return passes_[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  }

  /// MC-mean distribution, [samples, classes].
  Matrix mean() const;

  /// Keeps only the listed sample rows, in the given order.
  ProbabilityTensor subset(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<Matrix> passes_;
};

}  // namespace acqbench
