#include "noisylab/classifier.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace noisylab {

void MlpShape::validate() const {
  if (input_dim < 1) throw InvalidArgument("input dimension must be >= 1", "model.input_dim");
  if (classes < 2) throw InvalidArgument("class count must be >= 2", "model.classes");
  for (int width : hidden) {
    if (width < 1) throw InvalidArgument("hidden widths must be >= 1", "model.hidden");
  }
}

bool ModelParams::all_finite() const {
  for (const auto& layer : layers) {
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return count;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out;
  out.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    out.layers.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                          Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return out;
}

ModelParams init_mlp(const MlpShape& shape, std::uint64_t seed) {
  shape.validate();
  Rng rng(seed);
  ModelParams params;
  int fan_in = shape.input_dim;
  auto add_layer = [&](int fan_out) {
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    const double limit = std::sqrt(6.0 / fan_in);
    // Row-major fill order so the draw sequence is independent of Eigen's storage.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    }
    params.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (int width : shape.hidden) add_layer(width);
  add_layer(shape.classes);
  return params;
}

namespace {

struct ForwardCache {
  std::vector<BatchMatrix> activations;  // activations[0] = inputs, last = logits
};

ForwardCache forward_cached(const ModelParams& params, const Eigen::Ref<const BatchMatrix>& inputs) {
  if (inputs.rows() != params.input_dim()) {
    throw InvalidArgument("feature width " + std::to_string(inputs.rows()) +
                              " does not match model input " + std::to_string(params.input_dim()),
                          "features");
  }
  ForwardCache cache;
  cache.activations.reserve(params.layers.size() + 1);
  cache.activations.emplace_back(inputs);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    BatchMatrix z = layer.weights * cache.activations.back();
    z.colwise() += layer.bias;
    if (l + 1 < params.layers.size()) z = z.cwiseMax(0.0);
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

}  // namespace

BatchMatrix forward_logits(const ModelParams& params, const Eigen::Ref<const BatchMatrix>& inputs) {
  return std::move(forward_cached(params, inputs).activations.back());
}

ConfidenceMatrix softmax_columns(const Eigen::Ref<const BatchMatrix>& logits) {
  if (!logits.allFinite()) throw NumericalFault("non-finite logits");
  ConfidenceMatrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double peak = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - peak).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

ConfidenceMatrix predict_confidences(const ModelParams& params,
                                     const Eigen::Ref<const BatchMatrix>& inputs) {
  return softmax_columns(forward_logits(params, inputs));
}

BackwardResult backward(const ModelParams& params, const Eigen::Ref<const BatchMatrix>& inputs,
                        const Eigen::Ref<const Eigen::MatrixXd>& targets,
                        const std::vector<std::size_t>& selected, const LossSpec& loss) {
  if (selected.empty()) throw InvalidArgument("backward needs a non-empty selected set", "selected");
  if (targets.cols() != inputs.cols() || targets.rows() != params.classes()) {
    throw InvalidArgument("target matrix shape does not match batch", "targets");
  }

  const auto count = static_cast<Eigen::Index>(selected.size());
  BatchMatrix sub_inputs(inputs.rows(), count);
  Eigen::MatrixXd sub_targets(targets.rows(), count);
  for (Eigen::Index c = 0; c < count; ++c) {
    const auto src = static_cast<Eigen::Index>(selected[static_cast<std::size_t>(c)]);
    if (src >= inputs.cols()) throw InvalidArgument("selected index out of range", "selected");
    sub_inputs.col(c) = inputs.col(src);
    sub_targets.col(c) = targets.col(src);
  }

  ForwardCache cache = forward_cached(params, sub_inputs);
  const ConfidenceMatrix probs = softmax_columns(cache.activations.back());

  BackwardResult result{zeros_like(params), 0.0};
  const double inv_count = 1.0 / static_cast<double>(count);
  Eigen::MatrixXd delta(probs.rows(), count);
  double loss_sum = 0.0;
  for (Eigen::Index c = 0; c < count; ++c) {
    loss_sum += loss_value(probs.col(c), sub_targets.col(c), loss);
    delta.col(c) = loss_logit_gradient(probs.col(c), sub_targets.col(c), loss) * inv_count;
  }
  result.mean_loss = loss_sum * inv_count;

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const BatchMatrix& input = cache.activations[l];
    auto& grad = result.gradients.layers[l];
    grad.weights.noalias() = delta * input.transpose();
    grad.bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = params.layers[l].weights.transpose() * delta;
    // ReLU derivative, taking 0 at the kink.
    delta = upstream.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
  }
  return result;
}

double LrSchedule::at(std::size_t epoch) const {
  double rate = initial;
  for (const auto& [milestone, multiplier] : milestones) {
    if (epoch >= milestone) rate *= multiplier;
  }
  return rate;
}

OptimizerState OptimizerState::for_params(const ModelParams& params, double momentum,
                                          LrSchedule schedule) {
  return {zeros_like(params), momentum, std::move(schedule)};
}

void sgd_momentum_step(ModelParams& params, OptimizerState& state, const Gradients& gradients,
                       std::size_t epoch) {
  if (state.velocity.layers.size() != params.layers.size() ||
      gradients.layers.size() != params.layers.size()) {
    throw InvalidArgument("optimizer/gradient layout does not match parameters", "optimizer");
  }
  const double rate = state.schedule.at(epoch);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& v = state.velocity.layers[l];
    const auto& g = gradients.layers[l];
    auto& p = params.layers[l];
    if (v.weights.rows() != p.weights.rows() || v.weights.cols() != p.weights.cols() ||
        g.weights.rows() != p.weights.rows() || g.weights.cols() != p.weights.cols()) {
      throw InvalidArgument("optimizer/gradient shape mismatch at layer " + std::to_string(l),
                            "optimizer");
    }
    v.weights = state.momentum * v.weights + g.weights;
    v.bias = state.momentum * v.bias + g.bias;
    p.weights -= rate * v.weights;
    p.bias -= rate * v.bias;
  }
  if (!params.all_finite()) throw NumericalFault("non-finite parameters after SGD step");
}

namespace {

constexpr char kCheckpointMagic[4] = {'N', 'L', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_f64(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char bytes[8];
  for (auto& b : bytes) {
    b = static_cast<unsigned char>(bits);
    bits >>= 8;
  }
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw std::runtime_error("checkpoint truncated");
  return std::uint32_t{bytes[0]} | (std::uint32_t{bytes[1]} << 8) |
         (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 24);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("checkpoint truncated");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    put_u32(out, static_cast<std::uint32_t>(layer.weights.rows()));
    put_u32(out, static_cast<std::uint32_t>(layer.weights.cols()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) put_f64(out, layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put_f64(out, layer.bias(r));
  }
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path.string());
  }
  if (get_u32(in) != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
  const auto layer_count = get_u32(in);
  ModelParams params;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    const auto rows = static_cast<Eigen::Index>(get_u32(in));
    const auto cols = static_cast<Eigen::Index>(get_u32(in));
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = get_f64(in);
    }
    for (Eigen::Index r = 0; r < rows; ++r) layer.bias(r) = get_f64(in);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace noisylab
