#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "acqbench/acquisition.hpp"
#include "acqbench/rng.hpp"

namespace acqbench::acq {

namespace {

void check_budget(const char* who, std::size_t budget, std::size_t n) {
  if (budget > n)
    throw std::invalid_argument(std::string(who) + ": budget " + std::to_string(budget) + " exceeds pool size " +
                                std::to_string(n));
}

// Rows scaled to unit norm; all-zero rows stay zero.
Matrix normalized_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

// Lowest-index argmax over entries not yet taken. Assumes at least one is free.
std::size_t argmax_free(const std::vector<double>& values, const std::vector<char>& taken) {
  std::size_t best = values.size();
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (taken[j]) continue;
    if (best == values.size() || values[j] > values[best]) best = j;
  }
  return best;
}

std::size_t uniform_free(Rng& rng, const std::vector<char>& taken, std::size_t free_count) {
  std::size_t r = uniform_index(rng, free_count);
  for (std::size_t j = 0; j < taken.size(); ++j) {
    if (taken[j]) continue;
    if (r-- == 0) return j;
  }
  return taken.size();
}

// Draws one untaken index proportionally to `weights`; falls back to uniform if they sum to 0.
std::size_t weighted_free(Rng& rng, const std::vector<double>& weights, const std::vector<char>& taken,
                          std::size_t free_count) {
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (!taken[j]) total += weights[j];
  if (!(total > 0.0)) return uniform_free(rng, taken, free_count);
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last = weights.size();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (taken[j] || weights[j] <= 0.0) continue;
    acc += weights[j];
    last = j;
    if (target < acc) return j;
  }
  return last;
}

}  // namespace

double cosine_similarity(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

SelectionBatch select_top_k(const ScoreVector& scores, std::size_t budget) {
  check_budget("select_top_k", budget, scores.size());
  SelectionBatch order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(budget);
  return order;
}

SelectionBatch select_power(const ScoreVector& scores, std::size_t budget, double power, std::uint64_t seed) {
  check_budget("select_power", budget, scores.size());
  if (!(power >= 0.0) || !std::isfinite(power)) throw std::invalid_argument("select_power: power must be finite and >= 0");
  double max_score = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("select_power: scores must be finite and >= 0");
    max_score = std::max(max_score, s);
  }
  std::vector<double> weights(scores.size(), 0.0);
  if (max_score > 0.0)
    for (std::size_t i = 0; i < scores.size(); ++i)
      weights[i] = scores[i] > 0.0 ? std::pow(scores[i] / max_score, power) : 0.0;

  Rng rng(seed);
  std::vector<char> taken(scores.size(), 0);
  SelectionBatch out;
  out.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const std::size_t j = weighted_free(rng, weights, taken, scores.size() - k);
    taken[j] = 1;
    out.push_back(j);
  }
  return out;
}

SelectionBatch select_k_centers(const FeatureMatrix& pool, const FeatureMatrix& labeled, std::size_t budget) {
  const auto n = static_cast<std::size_t>(pool.rows());
  check_budget("select_k_centers", budget, n);
  if (labeled.rows() > 0 && labeled.cols() != pool.cols())
    throw std::invalid_argument("select_k_centers: labeled and pool feature widths differ");

  // Squared distances order points exactly as distances do.
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index l = 0; l < labeled.rows(); ++l)
    for (std::size_t i = 0; i < n; ++i)
      min_dist[i] = std::min(min_dist[i], (pool.row(static_cast<Eigen::Index>(i)) - labeled.row(l)).squaredNorm());

  std::vector<char> taken(n, 0);
  SelectionBatch out;
  out.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const std::size_t pick = argmax_free(min_dist, taken);
    taken[pick] = 1;
    out.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      min_dist[i] = std::min(min_dist[i], (pool.row(static_cast<Eigen::Index>(i)) - pool.row(static_cast<Eigen::Index>(pick))).squaredNorm());
  }
  return out;
}

GradientEmbeddingMatrix gradient_embeddings(const ProbabilityTensor& t, const FeatureMatrix& f) {
  if (static_cast<std::size_t>(f.rows()) != t.samples())
    throw std::invalid_argument("gradient_embeddings: probability and feature sample counts differ");
  const Matrix mean = t.mean();
  const auto c = mean.cols();
  const auto h = f.cols();
  GradientEmbeddingMatrix e(f.rows(), c * h);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    Eigen::Index predicted = 0;
    mean.row(i).maxCoeff(&predicted);  // first maximal coefficient
    for (Eigen::Index k = 0; k < c; ++k) {
      const double residual = mean(i, k) - (k == predicted ? 1.0 : 0.0);
      e.block(i, k * h, 1, h) = residual * f.row(i);
    }
  }
  return e;
}

SelectionBatch select_kmeanspp(const GradientEmbeddingMatrix& e, std::size_t budget, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(e.rows());
  check_budget("select_kmeanspp", budget, n);
  SelectionBatch out;
  if (budget == 0) return out;
  out.reserve(budget);
  Rng rng(seed);
  std::vector<char> taken(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t pick = uniform_index(rng, n);
  for (std::size_t k = 0;; ++k) {
    taken[pick] = 1;
    out.push_back(pick);
    if (k + 1 == budget) break;
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (e.row(static_cast<Eigen::Index>(i)) - e.row(static_cast<Eigen::Index>(pick))).squaredNorm());
    pick = weighted_free(rng, d2, taken, n - k - 1);
  }
  return out;
}

SelectionBatch select_facility_location(const FeatureMatrix& pool, std::size_t budget) {
  const auto n = static_cast<std::size_t>(pool.rows());
  check_budget("select_facility_location", budget, n);
  const Matrix unit = normalized_rows(pool);
  const Matrix sim = unit * unit.transpose();

  std::vector<double> coverage(n, 0.0);
  std::vector<double> gains(n);
  std::vector<char> taken(n, 0);
  SelectionBatch out;
  out.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        g += std::max(0.0, sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - coverage[i]);
      gains[j] = g;
    }
    const std::size_t pick = argmax_free(gains, taken);
    taken[pick] = 1;
    out.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      coverage[i] = std::max(coverage[i], sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pick)));
  }
  return out;
}

SelectionBatch select_disparity_min(const FeatureMatrix& candidates, std::size_t budget, std::size_t seed_index) {
  const auto n = static_cast<std::size_t>(candidates.rows());
  check_budget("select_disparity_min", budget, n);
  SelectionBatch out;
  if (budget == 0) return out;
  if (seed_index >= n) throw std::invalid_argument("select_disparity_min: seed index out of range");
  const Matrix unit = normalized_rows(candidates);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  out.reserve(budget);
  std::size_t pick = seed_index;
  for (std::size_t k = 0;; ++k) {
    taken[pick] = 1;
    out.push_back(pick);
    if (k + 1 == budget) break;
    for (std::size_t i = 0; i < n; ++i)
      min_dist[i] = std::min(min_dist[i], 1.0 - unit.row(static_cast<Eigen::Index>(i)).dot(unit.row(static_cast<Eigen::Index>(pick))));
    pick = argmax_free(min_dist, taken);
  }
  return out;
}

}  // namespace acqbench::acq
