#pragma once

#include "noisylab/losses.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace noisylab {

// Inputs and outputs are column-per-sample: features d x B, logits and
// confidences K x B.
using BatchMatrix = Eigen::MatrixXd;
using ConfidenceMatrix = Eigen::MatrixXd;

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

struct MlpShape {
  int input_dim = 2;
  std::vector<int> hidden{64, 64};
  int classes = 10;

  void validate() const;
};

// Dense layers with ReLU between them; the last layer emits K logits.
struct ModelParams {
  std::vector<DenseLayer> layers;

  int input_dim() const { return static_cast<int>(layers.front().weights.cols()); }
  int classes() const { return static_cast<int>(layers.back().weights.rows()); }
  bool all_finite() const;
  std::size_t parameter_count() const;
};

// Same layout as ModelParams.
using Gradients = ModelParams;

ModelParams zeros_like(const ModelParams& params);

// Weights ~ U(-sqrt(6 / fan_in), +sqrt(6 / fan_in)), biases zero.
ModelParams init_mlp(const MlpShape& shape, std::uint64_t seed);

BatchMatrix forward_logits(const ModelParams& params, const Eigen::Ref<const BatchMatrix>& inputs);

// Column-wise softmax with max subtraction. Throws NumericalFault on
// non-finite logits.
ConfidenceMatrix softmax_columns(const Eigen::Ref<const BatchMatrix>& logits);

ConfidenceMatrix predict_confidences(const ModelParams& params,
                                     const Eigen::Ref<const BatchMatrix>& inputs);

struct BackwardResult {
  Gradients gradients;
  double mean_loss = 0.0;
};

// Gradient of the mean loss over the columns listed in `selected` (indices
// into the batch). Targets are K x B one-hot or soft probability vectors.
BackwardResult backward(const ModelParams& params, const Eigen::Ref<const BatchMatrix>& inputs,
                        const Eigen::Ref<const Eigen::MatrixXd>& targets,
                        const std::vector<std::size_t>& selected, const LossSpec& loss);

// Step schedule: rate(epoch) = initial * prod(multiplier for each milestone <= epoch).
struct LrSchedule {
  double initial = 0.1;
  std::vector<std::pair<std::size_t, double>> milestones{{50, 0.2}, {75, 0.2}};

  double at(std::size_t epoch) const;
};

struct OptimizerState {
  Gradients velocity;
  double momentum = 0.9;
  LrSchedule schedule;

  static OptimizerState for_params(const ModelParams& params, double momentum,
                                   LrSchedule schedule);
};

// v <- momentum * v + g;  theta <- theta - rate(epoch) * v.
void sgd_momentum_step(ModelParams& params, OptimizerState& state, const Gradients& gradients,
                       std::size_t epoch);

// Flat little-endian checkpoint:
//   "NLCK" | u32 version (1) | u32 layer_count
//   per layer: u32 rows | u32 cols | rows*cols f64 weights (row-major) | rows f64 bias
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace noisylab
