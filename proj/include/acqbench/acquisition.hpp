#pragma once

#include <cstddef>
#include <cstdint>

#include "acqbench/tensor.hpp"

// Scoring and batch-selection primitives. Scorers follow "higher = select".
// Selectors return positions into the matrices/vectors they are given.
namespace acqbench::acq {

// --- uncertainty scorers --------------------------------------------------

/// Shannon entropy (nats) of the MC-mean distribution. 0 ln 0 := 0.
ScoreVector entropy_scores(const ProbabilityTensor& t);

/// 1 - max_c p̄_c.
ScoreVector least_confident_scores(const ProbabilityTensor& t);

/// -(p̄_(1) - p̄_(2)), the negated gap between the two most likely classes.
ScoreVector margin_scores(const ProbabilityTensor& t);

/// Class-averaged population standard deviation of p across passes.
ScoreVector mean_std_scores(const ProbabilityTensor& t);

/// Mutual information estimate H(p̄) - mean_k H(p^(k)), clamped at 0.
ScoreVector bald_scores(const ProbabilityTensor& t);

// --- selectors ------------------------------------------------------------

/// b largest scores, ordered by descending score then ascending index.
SelectionBatch select_top_k(const ScoreVector& scores, std::size_t budget);

/// Sampling without replacement with probability proportional to score^power.
/// When fewer than `budget` positive weights remain, the rest is drawn uniformly.
SelectionBatch select_power(const ScoreVector& scores, std::size_t budget, double power, std::uint64_t seed);

/// Farthest-first traversal in Euclidean distance, seeded with the labeled rows.
SelectionBatch select_k_centers(const FeatureMatrix& pool, const FeatureMatrix& labeled, std::size_t budget);

/// flatten((p̄_i - onehot(argmax p̄_i)) ⊗ h_i), class-major.
GradientEmbeddingMatrix gradient_embeddings(const ProbabilityTensor& t, const FeatureMatrix& f);

/// k-means++ seeding over embedding rows.
SelectionBatch select_kmeanspp(const GradientEmbeddingMatrix& e, std::size_t budget, std::uint64_t seed);

/// Greedy maximization of sum_i max_{j in S} cos(x_i, x_j), with the empty-set term taken as 0.
SelectionBatch select_facility_location(const FeatureMatrix& pool, std::size_t budget);

/// Greedy max-min diversity under d = 1 - cos, starting from `seed_index`.
SelectionBatch select_disparity_min(const FeatureMatrix& candidates, std::size_t budget, std::size_t seed_index = 0);

// --- helpers shared with oracles and aggregation ---------------------------

/// Cosine similarity between two rows; 0 if either row is all-zero.
double cosine_similarity(const Vector& a, const Vector& b);

}  // namespace acqbench::acq
