#include "acqbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "acqbench/rng.hpp"

namespace acqbench {

namespace {

void check_inputs(const ModelParams& params, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != params.arch.input_dim)
    throw std::invalid_argument("input dimension " + std::to_string(inputs.cols()) + " does not match model input " +
                                std::to_string(params.arch.input_dim));
}

void check_labels(const ModelParams& params, const Matrix& inputs, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(inputs.rows()))
    throw std::invalid_argument("label count does not match input rows");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= params.arch.classes)
      throw std::invalid_argument("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                                  " is outside [0, " + std::to_string(params.arch.classes) + ")");
  }
}

// Row-wise softmax in place, shifted by the row max.
template <typename M>
void softmax_rows(M& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const auto m = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - m).exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
}

// Parameters in the working precision of the training loop.
template <typename T>
struct Weights {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  Mat w1, w2, w3;
  Vec b1, b2, b3;
};

template <typename T>
Weights<T> cast_weights(const ModelParams& p) {
  return {p.w1.cast<T>(), p.w2.cast<T>(), p.w3.cast<T>(), p.b1.cast<T>(), p.b2.cast<T>(), p.b3.cast<T>()};
}

// Activations of one forward pass; reused across minibatches to avoid reallocation.
template <typename T>
struct Forward {
  using Mat = typename Weights<T>::Mat;
  Mat z1, h1, z2, h2, probs;
  Mat dlogits, dz2, dd1;
};

// `scaled_mask` already carries the inverted-dropout factor. After the call h1 holds the
// (masked) first-layer output fed to the second layer.
template <typename T>
void forward(const Weights<T>& p, const typename Weights<T>::Mat& x, const typename Weights<T>::Mat* scaled_mask,
             Forward<T>& f) {
  f.z1.noalias() = x * p.w1.transpose();
  f.z1.rowwise() += p.b1.transpose();
  f.h1 = f.z1.cwiseMax(T(0));
  if (scaled_mask) f.h1.array() *= scaled_mask->array();
  f.z2.noalias() = f.h1 * p.w2.transpose();
  f.z2.rowwise() += p.b2.transpose();
  f.h2 = f.z2.cwiseMax(T(0));
  f.probs.noalias() = f.h2 * p.w3.transpose();
  f.probs.rowwise() += p.b3.transpose();
  softmax_rows(f.probs);
}

Forward<double> forward(const ModelParams& p, const Matrix& x, const Matrix* scaled_mask) {
  Forward<double> f;
  const Weights<double> w{p.w1, p.w2, p.w3, p.b1, p.b2, p.b3};
  forward(w, x, scaled_mask, f);
  return f;
}

template <typename M>
void fill_dropout_mask(Rng& rng, M& m, Eigen::Index rows, Eigen::Index cols, double p) {
  using T = typename M::Scalar;
  m.resize(rows, cols);
  const T scale = p < 1.0 ? T(1.0 / (1.0 - p)) : T(0);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform01(rng) >= p ? scale : T(0);
}

Matrix dropout_mask(Rng& rng, Eigen::Index rows, Eigen::Index cols, double p) {
  Matrix m;
  fill_dropout_mask(rng, m, rows, cols, p);
  return m;
}

Matrix glorot(Rng& rng, std::size_t fan_out, std::size_t fan_in) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
  return w;
}

template <typename T>
double batch_loss_grad(const Weights<T>& p, const typename Weights<T>::Mat& x, std::span<const int> y,
                       const typename Weights<T>::Mat* scaled_mask, Weights<T>& g, Forward<T>& f) {
  forward(p, x, scaled_mask, f);
  const auto n = x.rows();
  const T inv_n = T(1) / static_cast<T>(n);

  double loss = 0.0;
  f.dlogits = f.probs;
  for (Eigen::Index i = 0; i < n; ++i) {
    loss -= std::log(std::max(static_cast<double>(f.probs(i, y[static_cast<std::size_t>(i)])), 1e-300));
    f.dlogits(i, y[static_cast<std::size_t>(i)]) -= T(1);
  }
  f.dlogits *= inv_n;

  g.w3.noalias() = f.dlogits.transpose() * f.h2;
  g.b3 = f.dlogits.colwise().sum().transpose();
  f.dz2.noalias() = f.dlogits * p.w3;
  f.dz2.array() *= (f.z2.array() > T(0)).template cast<T>();
  g.w2.noalias() = f.dz2.transpose() * f.h1;
  g.b2 = f.dz2.colwise().sum().transpose();
  f.dd1.noalias() = f.dz2 * p.w2;
  if (scaled_mask) f.dd1.array() *= scaled_mask->array();
  f.dd1.array() *= (f.z1.array() > T(0)).template cast<T>();
  g.w1.noalias() = f.dd1.transpose() * x;
  g.b1 = f.dd1.colwise().sum().transpose();
  return loss / static_cast<double>(n);
}

}  // namespace

void Architecture::validate() const {
  if (input_dim < 1) throw std::invalid_argument("architecture: input dimension must be >= 1");
  if (hidden < 1) throw std::invalid_argument("architecture: hidden width must be >= 1");
  if (classes < 2) throw std::invalid_argument("architecture: class count must be >= 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("architecture: dropout must lie in [0, 1)");
}

void TrainConfig::validate() const {
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0)
    throw std::invalid_argument("train: learning rate must be finite and > 0");
  if (minibatch < 1) throw std::invalid_argument("train: minibatch size must be >= 1");
}

void MCConfig::validate() const {
  if (passes < 1) throw std::invalid_argument("mc: number of passes must be >= 1");
}

ModelParams init_model(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::ModelInit)}));
  ModelParams p;
  p.arch = arch;
  p.w1 = glorot(rng, arch.hidden, arch.input_dim);
  p.w2 = glorot(rng, arch.hidden, arch.hidden);
  p.w3 = glorot(rng, arch.classes, arch.hidden);
  p.b1 = Vector::Zero(static_cast<Eigen::Index>(arch.hidden));
  p.b2 = Vector::Zero(static_cast<Eigen::Index>(arch.hidden));
  p.b3 = Vector::Zero(static_cast<Eigen::Index>(arch.classes));
  return p;
}

ModelParams train(ModelParams params, const Matrix& inputs, std::span<const int> labels, const TrainConfig& cfg) {
  cfg.validate();
  check_inputs(params, inputs);
  if (inputs.rows() == 0) throw std::invalid_argument("train: empty training data");
  check_labels(params, inputs, labels);

  const std::size_t n = static_cast<std::size_t>(inputs.rows());
  const std::size_t d = params.arch.input_dim;
  const double p_drop = params.arch.dropout;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // The SGD loop runs in single precision; parameters are returned in double.
  using Mat = Weights<float>::Mat;
  Weights<float> w = cast_weights<float>(params);
  const Mat x = inputs.cast<float>();
  Weights<float> g;
  Forward<float> work;
  Mat mask;
  Mat xb;
  std::vector<int> yb;
  const auto lr = static_cast<float>(cfg.learning_rate);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += cfg.minibatch) {
      const std::size_t m = std::min(cfg.minibatch, n - start);
      xb.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
      yb.resize(m);
      for (std::size_t r = 0; r < m; ++r) {
        xb.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(order[start + r]));
        yb[r] = labels[order[start + r]];
      }
      if (p_drop > 0.0) fill_dropout_mask(rng, mask, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(params.arch.hidden), p_drop);
      batch_loss_grad(w, xb, yb, p_drop > 0.0 ? &mask : nullptr, g, work);
      w.w1 -= lr * g.w1;
      w.b1 -= lr * g.b1;
      w.w2 -= lr * g.w2;
      w.b2 -= lr * g.b2;
      w.w3 -= lr * g.w3;
      w.b3 -= lr * g.b3;
    }
  }
  if (cfg.epochs > 0) {
    params.w1 = w.w1.cast<double>();
    params.b1 = w.b1.cast<double>();
    params.w2 = w.w2.cast<double>();
    params.b2 = w.b2.cast<double>();
    params.w3 = w.w3.cast<double>();
    params.b3 = w.b3.cast<double>();
  }
  return params;
}

ProbabilityTensor mc_predict(const ModelParams& params, const Matrix& inputs, const MCConfig& mc) {
  mc.validate();
  check_inputs(params, inputs);
  std::vector<Matrix> passes;
  passes.reserve(mc.passes);
  const bool stochastic = mc.dropout_active && params.arch.dropout > 0.0;
  Rng rng(mc.seed);
  for (std::size_t k = 0; k < mc.passes; ++k) {
    if (!stochastic) {
      passes.push_back(k == 0 ? forward(params, inputs, nullptr).probs : passes.front());
      continue;
    }
    const Matrix mask = dropout_mask(rng, inputs.rows(), static_cast<Eigen::Index>(params.arch.hidden), params.arch.dropout);
    passes.push_back(forward(params, inputs, &mask).probs);
  }
  return ProbabilityTensor(std::move(passes));
}

FeatureMatrix features(const ModelParams& params, const Matrix& inputs) {
  check_inputs(params, inputs);
  return forward(params, inputs, nullptr).h2;
}

Matrix predict_proba(const ModelParams& params, const Matrix& inputs) {
  check_inputs(params, inputs);
  return forward(params, inputs, nullptr).probs;
}

double mean_cross_entropy(const ModelParams& params, const Matrix& inputs, std::span<const int> labels) {
  check_inputs(params, inputs);
  check_labels(params, inputs, labels);
  if (inputs.rows() == 0) return 0.0;
  const Matrix probs = predict_proba(params, inputs);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i)
    loss -= std::log(std::max(probs(i, labels[static_cast<std::size_t>(i)]), 1e-300));
  return loss / static_cast<double>(probs.rows());
}

double accuracy(const ModelParams& params, const Matrix& inputs, std::span<const int> labels) {
  check_inputs(params, inputs);
  check_labels(params, inputs, labels);
  if (inputs.rows() == 0) return 0.0;
  const Matrix probs = predict_proba(params, inputs);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index arg = 0;
    probs.row(i).maxCoeff(&arg);
    if (arg == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(probs.rows());
}

double loss_and_gradients(const ModelParams& params, const Matrix& inputs, std::span<const int> labels,
                          const Matrix* keep_mask, Gradients& grads) {
  check_inputs(params, inputs);
  check_labels(params, inputs, labels);
  if (inputs.rows() == 0) throw std::invalid_argument("loss_and_gradients: empty batch");
  const Weights<double> w{params.w1, params.w2, params.w3, params.b1, params.b2, params.b3};
  Weights<double> g;
  Forward<double> f;
  const double p = params.arch.dropout;
  const Matrix scaled = keep_mask ? Matrix(*keep_mask * (p < 1.0 ? 1.0 / (1.0 - p) : 0.0)) : Matrix();
  const double loss = batch_loss_grad(w, inputs, labels, keep_mask ? &scaled : nullptr, g, f);
  grads = {g.w1, g.b1, g.w2, g.b2, g.w3, g.b3};
  return loss;
}

}  // namespace acqbench
