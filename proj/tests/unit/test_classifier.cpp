#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "noisylab/classifier.hpp"
#include "noisylab/errors.hpp"
#include "noisylab/rng.hpp"

using namespace noisylab;

namespace {

// Plain-loop reference forward pass and loss, kept apart from the library code.
double reference_loss(const ModelParams& params, const Eigen::MatrixXd& inputs,
                      const std::vector<int>& labels, const LossSpec& loss) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < inputs.cols(); ++s) {
    std::vector<double> act(inputs.rows());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) act[i] = inputs(i, s);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const auto& layer = params.layers[l];
      std::vector<double> next(layer.weights.rows());
      for (Eigen::Index o = 0; o < layer.weights.rows(); ++o) {
        double z = layer.bias(o);
        for (Eigen::Index i = 0; i < layer.weights.cols(); ++i) z += layer.weights(o, i) * act[i];
        next[o] = (l + 1 < params.layers.size()) ? std::max(0.0, z) : z;
      }
      act = next;
    }
    double mx = *std::max_element(act.begin(), act.end());
    double denom = 0.0;
    for (double z : act) denom += std::exp(z - mx);
    double p = std::exp(act[labels[s]] - mx) / denom;
    double ce = -std::log(std::max(p, 1e-12));
    double value = ce;
    if (loss.kind == LossKind::SL)
      value = loss.sl.alpha * ce + loss.sl.beta * (-loss.sl.log_zero_clamp) * (1.0 - p);
    total += value;
  }
  return total / static_cast<double>(inputs.cols());
}

std::vector<double*> flatten(ModelParams& params) {
  std::vector<double*> out;
  for (auto& layer : params.layers) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) out.push_back(layer.weights.data() + i);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) out.push_back(layer.bias.data() + i);
  }
  return out;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int k) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) t(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
  return t;
}

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

ModelParams scalar_model(double w) {
  ModelParams p;
  p.layers.push_back({Eigen::MatrixXd::Constant(1, 1, w), Eigen::VectorXd::Zero(1)});
  return p;
}

double gradient_relative_error(std::uint64_t seed, const LossSpec& loss) {
  ModelParams params = init_mlp({2, {3}, 2}, seed);
  Rng rng(derive_seed(seed, 17));
  Eigen::MatrixXd inputs(2, 3);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = rng.normal();
  std::vector<int> labels{static_cast<int>(rng.uniform_int(2)), static_cast<int>(rng.uniform_int(2)),
                          static_cast<int>(rng.uniform_int(2))};
  auto result = backward(params, inputs, one_hot(labels, 2), all_positions(3), loss);
  CHECK(result.mean_loss == doctest::Approx(reference_loss(params, inputs, labels, loss)));

  ModelParams grads = result.gradients;
  auto analytic = flatten(grads);
  auto values = flatten(params);
  const double h = 1e-5;
  double diff2 = 0.0, norm_a = 0.0, norm_n = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double saved = *values[i];
    *values[i] = saved + h;
    double up = reference_loss(params, inputs, labels, loss);
    *values[i] = saved - h;
    double down = reference_loss(params, inputs, labels, loss);
    *values[i] = saved;
    double numeric = (up - down) / (2.0 * h);
    diff2 += (numeric - *analytic[i]) * (numeric - *analytic[i]);
    norm_a += *analytic[i] * *analytic[i];
    norm_n += numeric * numeric;
  }
  double denom = std::sqrt(norm_a) + std::sqrt(norm_n);
  return denom == 0.0 ? 0.0 : std::sqrt(diff2) / denom;
}

}  // namespace

TEST_CASE("softmax of equal logits is uniform") {
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(2, 1);
  auto p = softmax_columns(logits);
  CHECK(p(0, 0) == 0.5);
  CHECK(p(1, 0) == 0.5);

  ModelParams zero = init_mlp({2, {4}, 2}, 1);
  for (auto& l : zero.layers) {
    l.weights.setZero();
    l.bias.setZero();
  }
  auto q = predict_confidences(zero, Eigen::MatrixXd::Random(2, 3));
  CHECK((q.array() == 0.5).all());
}

TEST_CASE("softmax of ln2 and 0") {
  Eigen::MatrixXd logits(2, 1);
  logits << std::log(2.0), 0.0;
  auto p = softmax_columns(logits);
  CHECK(p(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("random network confidences are distributions") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto params = init_mlp({5, {64, 64}, 10}, seed);
    Rng rng(seed);
    Eigen::MatrixXd x(5, 32);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 3.0 * rng.normal();
    auto p = predict_confidences(params, x);
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      CHECK(std::abs(p.col(c).sum() - 1.0) < 1e-9);
      CHECK((p.col(c).array() >= 0.0).all());
    }
    Eigen::MatrixXd logits = forward_logits(params, x);
    Eigen::MatrixXd shifted = logits.array() + 123.0;
    CHECK((softmax_columns(shifted) - softmax_columns(logits)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("non-finite logits raise a numerical fault") {
  Eigen::MatrixXd logits(2, 1);
  logits << std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(softmax_columns(logits), NumericalFault);
}

TEST_CASE("init respects shape and He bound") {
  auto params = init_mlp({7, {64, 64}, 10}, 3);
  REQUIRE(params.layers.size() == 3);
  CHECK(params.input_dim() == 7);
  CHECK(params.classes() == 10);
  CHECK(params.parameter_count() == 7 * 64 + 64 + 64 * 64 + 64 + 64 * 10 + 10);
  double bound = std::sqrt(6.0 / 7.0);
  CHECK(params.layers[0].weights.cwiseAbs().maxCoeff() <= bound);
  CHECK(params.all_finite());
  auto again = init_mlp({7, {64, 64}, 10}, 3);
  CHECK(again.layers[1].weights == params.layers[1].weights);
}

TEST_CASE("perfect fit has zero gradient") {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  p(1) = 1.0;
  CHECK(loss_logit_gradient(p, p, LossSpec{}).isZero(0.0));

  ModelParams params;
  Eigen::MatrixXd w(2, 1);
  w << 1e5, 0.0;
  params.layers.push_back({w, Eigen::VectorXd::Zero(2)});
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  REQUIRE(predict_confidences(params, x)(0, 0) == 1.0);
  auto result = backward(params, x, one_hot({0}, 2), {0}, LossSpec{});
  CHECK(result.gradients.layers[0].weights.cwiseAbs().maxCoeff() < 1e-300);
  CHECK(result.gradients.layers[0].bias.cwiseAbs().maxCoeff() < 1e-300);
  CHECK(result.mean_loss == 0.0);
}

TEST_CASE("analytic gradients match finite differences") {
  LossSpec ce;
  LossSpec sl{LossKind::SL, SlConfig{1.0, 0.3, -4.0}};
  double worst_ce = 0.0, worst_sl = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    worst_ce = std::max(worst_ce, gradient_relative_error(seed, ce));
    worst_sl = std::max(worst_sl, gradient_relative_error(seed, sl));
  }
  CHECK(worst_ce < 1e-4);
  CHECK(worst_sl < 1e-4);
}

TEST_CASE("duplicate samples average to the single sample gradient") {
  auto params = init_mlp({3, {8}, 4}, 21);
  Eigen::MatrixXd x1(3, 1);
  x1 << 0.3, -1.2, 0.8;
  Eigen::MatrixXd x2(3, 2);
  x2 << x1, x1;
  auto single = backward(params, x1, one_hot({2}, 4), {0}, LossSpec{});
  auto twice = backward(params, x2, one_hot({2, 2}, 4), {0, 1}, LossSpec{});
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    CHECK((single.gradients.layers[l].weights - twice.gradients.layers[l].weights).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((single.gradients.layers[l].bias - twice.gradients.layers[l].bias).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("only selected columns contribute") {
  auto params = init_mlp({2, {5}, 3}, 8);
  Eigen::MatrixXd x(2, 3);
  x << 0.1, 2.0, -1.0, 0.5, -0.3, 1.5;
  Eigen::MatrixXd targets = one_hot({0, 1, 2}, 3);
  auto subset = backward(params, x, targets, {1}, LossSpec{});
  auto alone = backward(params, x.col(1), targets.col(1), {0}, LossSpec{});
  CHECK((subset.gradients.layers[0].weights - alone.gradients.layers[0].weights).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(backward(params, x, targets, {}, LossSpec{}), InvalidArgument);
}

TEST_CASE("plain SGD step") {
  auto params = scalar_model(5.0);
  auto state = OptimizerState::for_params(params, 0.0, LrSchedule{1.0, {}});
  auto grads = scalar_model(2.0);
  sgd_momentum_step(params, state, grads, 0);
  CHECK(params.layers[0].weights(0, 0) == 3.0);
}

TEST_CASE("learning rate schedule") {
  LrSchedule s;
  CHECK(s.at(0) == 0.1);
  CHECK(s.at(49) == 0.1);
  CHECK(s.at(50) == doctest::Approx(0.02));
  CHECK(s.at(74) == doctest::Approx(0.02));
  CHECK(s.at(75) == doctest::Approx(0.004));
  CHECK(s.at(99) == doctest::Approx(0.004));
}

TEST_CASE("momentum accumulates velocity") {
  auto params = scalar_model(0.0);
  auto state = OptimizerState::for_params(params, 0.9, LrSchedule{0.1, {}});
  auto grads = scalar_model(1.0);
  sgd_momentum_step(params, state, grads, 0);
  double first = -params.layers[0].weights(0, 0);
  sgd_momentum_step(params, state, grads, 1);
  double second = -params.layers[0].weights(0, 0) - first;
  CHECK(second / first == doctest::Approx(1.9));
}

TEST_CASE("non-finite update is a numerical fault") {
  auto params = scalar_model(0.0);
  auto state = OptimizerState::for_params(params, 0.9, LrSchedule{});
  auto grads = scalar_model(std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(sgd_momentum_step(params, state, grads, 0), NumericalFault);
}

TEST_CASE("checkpoint round trip") {
  auto params = init_mlp({4, {6, 5}, 3}, 2);
  auto path = std::filesystem::temp_directory_path() / "noisylab_ckpt_test.bin";
  save_checkpoint(params, path);
  auto loaded = load_checkpoint(path);
  std::filesystem::remove(path);
  REQUIRE(loaded.layers.size() == params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    CHECK(loaded.layers[l].weights == params.layers[l].weights);
    CHECK(loaded.layers[l].bias == params.layers[l].bias);
  }
  CHECK_THROWS(load_checkpoint(path));
}
