#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acqbench/acquisition.hpp"

namespace acqbench::acq {

namespace {

double row_entropy(const Matrix& p, Eigen::Index i) {
  double h = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double v = p(i, c);
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

ScoreVector entropy_scores(const ProbabilityTensor& t) {
  const Matrix mean = t.mean();
  ScoreVector s(t.samples());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = row_entropy(mean, static_cast<Eigen::Index>(i));
  return s;
}

ScoreVector least_confident_scores(const ProbabilityTensor& t) {
  const Matrix mean = t.mean();
  ScoreVector s(t.samples());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 1.0 - mean.row(static_cast<Eigen::Index>(i)).maxCoeff();
  return s;
}

ScoreVector margin_scores(const ProbabilityTensor& t) {
  if (t.classes() < 2) throw std::invalid_argument("margin_scores: needs at least 2 classes");
  const Matrix mean = t.mean();
  ScoreVector s(t.samples());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double first = -1.0, second = -1.0;
    for (Eigen::Index c = 0; c < mean.cols(); ++c) {
      const double v = mean(static_cast<Eigen::Index>(i), c);
      if (v > first) {
        second = first;
        first = v;
      } else if (v > second) {
        second = v;
      }
    }
    s[i] = -(first - second);
  }
  return s;
}

ScoreVector mean_std_scores(const ProbabilityTensor& t) {
  const Matrix mean = t.mean();
  Matrix var = Matrix::Zero(mean.rows(), mean.cols());
  for (std::size_t k = 0; k < t.passes(); ++k) var += (t.pass(k) - mean).cwiseAbs2();
  var /= static_cast<double>(t.passes());
  ScoreVector s(t.samples());
  for (Eigen::Index i = 0; i < mean.rows(); ++i)
    s[static_cast<std::size_t>(i)] = var.row(i).cwiseSqrt().sum() / static_cast<double>(mean.cols());
  return s;
}

ScoreVector bald_scores(const ProbabilityTensor& t) {
  const Matrix mean = t.mean();
  ScoreVector s(t.samples());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    double expected = 0.0;
    for (std::size_t k = 0; k < t.passes(); ++k) expected += row_entropy(t.pass(k), row);
    expected /= static_cast<double>(t.passes());
    s[i] = std::max(0.0, row_entropy(mean, row) - expected);
  }
  return s;
}

}  // namespace acqbench::acq
