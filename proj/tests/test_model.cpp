#include <doctest.h>

#include <cmath>
#include <random>

#include "acqbench/datasets.hpp"
#include "acqbench/model.hpp"

using namespace acqbench;

namespace {

Dataset two_blobs(std::uint64_t seed) {
  Matrix centers(2, 2);
  centers << -2.0, 0.0, 2.0, 0.0;
  return make_blobs(100, 2, centers, 0.3, seed);
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

double loss_at(const ModelParams& p, const Matrix& x, const std::vector<int>& y, const Matrix& keep) {
  Gradients g;
  return loss_and_gradients(p, x, y, &keep, g);
}

// Central differences over every parameter of one block.
template <typename Block>
double fd_relative_error(ModelParams p, Block ModelParams::*block, const Matrix& analytic, const Matrix& x,
                         const std::vector<int>& y, const Matrix& keep) {
  const double h = 1e-4;
  double worst = 0.0;
  auto& w = p.*block;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double orig = w(i, j);
      w(i, j) = orig + h;
      const double up = loss_at(p, x, y, keep);
      w(i, j) = orig - h;
      const double down = loss_at(p, x, y, keep);
      w(i, j) = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic(i, j);
      const double denom = std::max(std::abs(a) + std::abs(numeric), 1e-6);
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("init_model is deterministic and validates its shape") {
  Architecture arch{3, 8, 4, 0.5};
  CHECK(init_model(arch, 7) == init_model(arch, 7));
  CHECK_FALSE(init_model(arch, 7) == init_model(arch, 8));
  const auto p = init_model(arch, 1);
  CHECK(p.w1.rows() == 8);
  CHECK(p.w1.cols() == 3);
  CHECK(p.w3.rows() == 4);
  CHECK(p.b1.isZero());
  CHECK(p.b3.isZero());
  const double limit = std::sqrt(6.0 / 11.0);
  CHECK(p.w1.cwiseAbs().maxCoeff() <= limit);

  Architecture bad = arch;
  bad.hidden = 0;
  CHECK_THROWS_AS(init_model(bad, 0), std::invalid_argument);
  bad = arch;
  bad.classes = 1;
  CHECK_THROWS_AS(init_model(bad, 0), std::invalid_argument);
}

TEST_CASE("zero epochs returns the parameters unchanged") {
  const auto ds = two_blobs(0);
  const auto p = init_model({2, 16, 2, 0.5}, 3);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(train(p, ds.x, ds.y, cfg) == p);
}

TEST_CASE("training is deterministic given the seed") {
  const auto ds = two_blobs(1);
  const auto p = init_model({2, 16, 2, 0.5}, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;
  CHECK(train(p, ds.x, ds.y, cfg) == train(p, ds.x, ds.y, cfg));
  cfg.seed = 12;
  const auto other = train(p, ds.x, ds.y, cfg);
  cfg.seed = 11;
  CHECK_FALSE(train(p, ds.x, ds.y, cfg) == other);
}

TEST_CASE("training rejects bad labels and empty data") {
  const auto p = init_model({2, 4, 2, 0.0}, 0);
  Matrix x(2, 2);
  x.setZero();
  std::vector<int> y{0, 2};
  CHECK_THROWS_AS(train(p, x, y, TrainConfig{}), std::invalid_argument);
  y = {0, -1};
  CHECK_THROWS_AS(train(p, x, y, TrainConfig{}), std::invalid_argument);
  Matrix empty(0, 2);
  std::vector<int> none;
  CHECK_THROWS_AS(train(p, empty, none, TrainConfig{}), std::invalid_argument);
  Matrix wrong(2, 3);
  wrong.setZero();
  y = {0, 1};
  CHECK_THROWS_AS(train(p, wrong, y, TrainConfig{}), std::invalid_argument);
}

TEST_CASE("two separated blobs are learned to at least 95% training accuracy") {
  const auto ds = two_blobs(2);
  // The perpendicular bisector x0 = 0 separates the blobs exactly.
  std::size_t oracle_correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    oracle_correct += (ds.x(static_cast<Eigen::Index>(i), 0) > 0.0 ? 1 : 0) == ds.y[i];
  REQUIRE(oracle_correct == ds.size());

  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.epochs = 100;
  cfg.seed = 5;
  const auto trained = train(init_model({2, 16, 2, 0.5}, 4), ds.x, ds.y, cfg);
  CHECK(accuracy(trained, ds.x, ds.y) >= 0.95);
}

TEST_CASE("training does not increase the mean cross-entropy on blobs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CAPTURE(seed);
    const auto ds = two_blobs(100 + seed);
    const auto p = init_model({2, 16, 2, 0.5}, seed);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.epochs = 40;
    cfg.seed = seed;
    const double before = mean_cross_entropy(p, ds.x, ds.y);
    const double after = mean_cross_entropy(train(p, ds.x, ds.y, cfg), ds.x, ds.y);
    CHECK(after <= before);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(42);
  const Architecture arch{3, 6, 3, 0.3};
  const auto p = init_model(arch, 9);
  // Shift biases away from zero so that no pre-activation sits on a ReLU kink.
  auto q = p;
  q.b1.setConstant(0.05);
  q.b2.setConstant(0.05);
  q.b3 << 0.1, -0.1, 0.0;
  const Matrix x = random_matrix(rng, 8, 3);
  const std::vector<int> y{0, 1, 2, 0, 1, 2, 0, 1};
  Matrix keep(8, 6);
  std::bernoulli_distribution coin(0.7);
  for (Eigen::Index i = 0; i < keep.rows(); ++i)
    for (Eigen::Index j = 0; j < keep.cols(); ++j) keep(i, j) = coin(rng) ? 1.0 : 0.0;

  Gradients g;
  loss_and_gradients(q, x, y, &keep, g);
  CHECK(fd_relative_error(q, &ModelParams::w1, g.w1, x, y, keep) < 1e-3);
  CHECK(fd_relative_error(q, &ModelParams::w2, g.w2, x, y, keep) < 1e-3);
  CHECK(fd_relative_error(q, &ModelParams::w3, g.w3, x, y, keep) < 1e-3);
  CHECK(fd_relative_error(q, &ModelParams::b1, Matrix(g.b1), x, y, keep) < 1e-3);
  CHECK(fd_relative_error(q, &ModelParams::b2, Matrix(g.b2), x, y, keep) < 1e-3);
  CHECK(fd_relative_error(q, &ModelParams::b3, Matrix(g.b3), x, y, keep) < 1e-3);

  // Without a mask the same check applies to the deterministic network.
  Gradients g0;
  const Matrix all = Matrix::Ones(8, 6) ;
  loss_and_gradients(q, x, y, nullptr, g0);
  Gradients g1;
  loss_and_gradients(q, x, y, &all, g1);
  // An all-keep mask still carries the 1/(1-p) scale, so the two differ.
  CHECK_FALSE(g0.w2.isApprox(g1.w2));
}

TEST_CASE("mc_predict rows lie on the simplex and respect the dropout switch") {
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(rng, 20, 2);
  auto p = init_model({2, 8, 3, 0.5}, 1);
  MCConfig mc;
  mc.passes = 5;
  mc.seed = 17;
  const auto t = mc_predict(p, x, mc);
  REQUIRE(t.passes() == 5);
  REQUIRE(t.samples() == 20);
  REQUIRE(t.classes() == 3);
  for (std::size_t k = 0; k < t.passes(); ++k)
    for (std::size_t i = 0; i < t.samples(); ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < t.classes(); ++c) {
        CHECK(t(k, i, c) >= 0.0);
        sum += t(k, i, c);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  const auto again = mc_predict(p, x, mc);
  for (std::size_t k = 0; k < t.passes(); ++k) CHECK(t.pass(k) == again.pass(k));
  CHECK_FALSE(t.pass(0) == t.pass(1));

  mc.dropout_active = false;
  const auto off = mc_predict(p, x, mc);
  for (std::size_t k = 1; k < off.passes(); ++k) CHECK(off.pass(k) == off.pass(0));

  p.arch.dropout = 0.0;
  mc.dropout_active = true;
  const auto nodrop = mc_predict(p, x, mc);
  for (std::size_t k = 1; k < nodrop.passes(); ++k) CHECK(nodrop.pass(k) == nodrop.pass(0));

  Matrix wrong(2, 3);
  wrong.setZero();
  CHECK_THROWS_AS(mc_predict(p, wrong, mc), std::invalid_argument);
}

TEST_CASE("features are non-negative last-hidden activations") {
  const auto p = init_model({2, 8, 2, 0.5}, 5);
  Matrix zero = Matrix::Zero(3, 2);
  const auto f0 = features(p, zero);
  CHECK(f0.rows() == 3);
  CHECK(f0.cols() == 8);
  CHECK(f0.isZero());
  std::mt19937_64 rng(1);
  const auto f = features(p, random_matrix(rng, 50, 2));
  CHECK(f.minCoeff() >= 0.0);
  CHECK(f.rows() == 50);
}
