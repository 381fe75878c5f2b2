#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "acqbench/tensor.hpp"

namespace acqbench {

/// input -> dense(H, relu) -> dropout(p) -> dense(H, relu) -> dense(C, softmax)
struct Architecture {
  std::size_t input_dim = 2;
  std::size_t hidden = 32;
  std::size_t classes = 2;
  double dropout = 0.5;

  void validate() const;
  bool operator==(const Architecture&) const = default;
};

struct ModelParams {
  Architecture arch;
  Matrix w1;  // [H, d]
  Vector b1;
  Matrix w2;  // [H, H]
  Vector b2;
  Matrix w3;  // [C, H]
  Vector b3;

  bool operator==(const ModelParams& o) const {
    return arch == o.arch && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2 && w3 == o.w3 &&
           b3 == o.b3;
  }
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 40;
  std::size_t minibatch = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MCConfig {
  std::size_t passes = 5;
  bool dropout_active = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Glorot-uniform weights, zero biases. Deterministic in (arch, seed).
ModelParams init_model(const Architecture& arch, std::uint64_t seed);

/// Minibatch SGD on mean softmax cross-entropy with dropout active.
/// Labels must lie in [0, classes).
ModelParams train(ModelParams params, const Matrix& inputs, std::span<const int> labels,
                  const TrainConfig& cfg);

/// N_mc stochastic forward passes. With dropout inactive (or p == 0) every pass is identical.
ProbabilityTensor mc_predict(const ModelParams& params, const Matrix& inputs, const MCConfig& mc);

/// Post-ReLU activations of the second hidden layer, dropout disabled. [n, H]
FeatureMatrix features(const ModelParams& params, const Matrix& inputs);

/// Deterministic class probabilities (dropout disabled). [n, C]
Matrix predict_proba(const ModelParams& params, const Matrix& inputs);

double mean_cross_entropy(const ModelParams& params, const Matrix& inputs, std::span<const int> labels);
double accuracy(const ModelParams& params, const Matrix& inputs, std::span<const int> labels);

struct Gradients {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
  Matrix w3;
  Vector b3;
};

/// Mean cross-entropy and its gradient for one batch. `keep_mask` ([n, H], entries 0/1) fixes the
/// dropout pattern; pass nullptr for no dropout.
double loss_and_gradients(const ModelParams& params, const Matrix& inputs, std::span<const int> labels,
                          const Matrix* keep_mask, Gradients& grads);

}  // namespace acqbench
