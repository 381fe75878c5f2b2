#include "acqbench/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace acqbench {

ProbabilityTensor::ProbabilityTensor(std::vector<Matrix> passes) : passes_(std::move(passes)) {
  if (passes_.empty()) throw std::invalid_argument("probability tensor needs at least one pass");
  const auto n = passes_[0].rows();
  const auto c = passes_[0].cols();
  for (std::size_t k = 0; k < passes_.size(); ++k) {
    const Matrix& p = passes_[k];
    if (p.rows() != n || p.cols() != c)
      throw std::invalid_argument("probability tensor passes have inconsistent shapes");
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < c; ++j) {
        const double v = p(i, j);
        if (!(v >= 0.0 && v <= 1.0 + kRowTolerance))
          throw std::invalid_argument("probability out of [0,1] at pass " + std::to_string(k) + ", row " +
                                      std::to_string(i));
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowTolerance)
        throw std::invalid_argument("probability row does not sum to 1 at pass " + std::to_string(k) +
                                    ", row " + std::to_string(i));
    }
  }
}

Matrix ProbabilityTensor::mean() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(samples()), static_cast<Eigen::Index>(classes()));
  for (const auto& p : passes_) m += p;
  if (!passes_.empty()) m /= static_cast<double>(passes_.size());
  return m;
}

ProbabilityTensor ProbabilityTensor::subset(const std::vector<std::size_t>& rows) const {
  ProbabilityTensor out;
  out.passes_.reserve(passes_.size());
  for (const auto& p : passes_) {
    Matrix s(static_cast<Eigen::Index>(rows.size()), p.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) s.row(static_cast<Eigen::Index>(r)) = p.row(static_cast<Eigen::Index>(rows[r]));
    out.passes_.push_back(std::move(s));
  }
  return out;
}

}  // namespace acqbench
