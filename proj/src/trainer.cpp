#include "noisylab/trainer.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace noisylab {

std::string_view to_string(PenaltyUpdate update) {
  return update == PenaltyUpdate::StackedPerIteration ? "stacked" : "repredict";
}

PenaltyUpdate parse_penalty_update(std::string_view name) {
  if (name == "stacked" || name == "StackedPerIteration") return PenaltyUpdate::StackedPerIteration;
  if (name == "repredict" || name == "RepredictAtEpochEnd") return PenaltyUpdate::RepredictAtEpochEnd;
  throw InvalidArgument("unknown penalty update '" + std::string(name) +
                            "' (valid: stacked, repredict)",
                        "train.penalty_update");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw InvalidArgument("epochs must be >= 1", "train.epochs");
  if (warmup_epochs > epochs) {
    throw InvalidArgument("warmup_epochs must not exceed epochs", "train.warmup_epochs");
  }
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1", "train.batch_size");
  if (!(select_percent > 0.0) || select_percent > 100.0) {
    throw InvalidArgument("select_percent must lie in (0, 100]", "train.select_percent");
  }
  if (!(momentum >= 0.0) || momentum >= 1.0) {
    throw InvalidArgument("momentum must lie in [0, 1)", "train.momentum");
  }
  if (!(schedule.initial > 0.0)) throw InvalidArgument("learning rate must be positive", "train.lr");
  criteria.validate();
  if (loss.kind == LossKind::SL) loss.sl.validate();
  for (int w : hidden) {
    if (w < 1) throw InvalidArgument("hidden widths must be >= 1", "train.hidden");
  }
}

SeedStreams SeedStreams::from(std::uint64_t seed) {
  return {derive_seed(seed, 101), derive_seed(seed, 202), derive_seed(seed, 303)};
}

TrainState init_train_state(const TrainConfig& config, int input_dim, int k) {
  const auto seeds = SeedStreams::from(config.seed);
  ModelParams params = init_mlp({input_dim, config.hidden, k}, seeds.init);
  OptimizerState opt = OptimizerState::for_params(params, config.momentum, config.schedule);
  return {std::move(params), std::move(opt), ConfidenceAccumulator(k), uniform_penalty_labels(k)};
}

std::vector<double> score_batch(const Eigen::Ref<const ConfidenceMatrix>& confidences,
                                std::span<const int> observed, const CriteriaConfig& criteria,
                                const PenaltyLabelSet& penalty) {
  std::vector<double> scores(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const auto p = confidences.col(static_cast<Eigen::Index>(i));
    const int label = observed[i];
    switch (criteria.variant) {
      case CriteriaVariant::None:
      case CriteriaVariant::OL:
        scores[i] = criteria_ol(p, label);
        break;
      case CriteriaVariant::PL:
        scores[i] = -criteria_pl(p, penalty.labels.row(label).transpose());
        break;
      case CriteriaVariant::ALL:
        scores[i] = criteria_all(p, label, penalty.labels.row(label).transpose(), criteria.lambda);
        break;
    }
  }
  return scores;
}

namespace {

BatchMatrix gather_inputs(const FeatureMatrix& features, const IndexList& indices) {
  BatchMatrix inputs(features.cols(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    inputs.col(static_cast<Eigen::Index>(c)) =
        features.row(static_cast<Eigen::Index>(indices[c])).transpose();
  }
  return inputs;
}

constexpr Eigen::Index kPredictChunk = 1024;

ConfidenceMatrix predict_all(const ModelParams& params, const FeatureMatrix& features) {
  const Eigen::Index n = features.rows();
  ConfidenceMatrix out(params.classes(), n);
  for (Eigen::Index start = 0; start < n; start += kPredictChunk) {
    const Eigen::Index len = std::min(kPredictChunk, n - start);
    const BatchMatrix inputs = features.middleRows(start, len).transpose();
    out.middleCols(start, len) = predict_confidences(params, inputs);
  }
  return out;
}

}  // namespace

EpochStats train_epoch(TrainState& state, const LabeledDataset& train, const TrainConfig& config,
                       std::size_t epoch, const BatchObserver& observer) {
  const int k = train.k;
  const bool needs_penalty = config.criteria.uses_penalty();
  const bool selection_active = epoch >= config.warmup_epochs &&
                                config.criteria.variant != CriteriaVariant::None;
  const auto expected_stamp = static_cast<std::int64_t>(epoch) - 1;
  if (needs_penalty && selection_active && state.penalty.epoch_of_estimate != expected_stamp) {
    throw std::logic_error("penalty labels for epoch " + std::to_string(epoch) +
                           " were not estimated at the end of epoch " +
                           std::to_string(expected_stamp));
  }

  const auto seeds = SeedStreams::from(config.seed);
  const auto batches = epoch_batches(train, config.batch_size, seeds.shuffle, epoch);
  const bool stacking = config.penalty_update == PenaltyUpdate::StackedPerIteration;

  EpochStats stats;
  stats.epoch = epoch;
  stats.selected_per_class.assign(static_cast<std::size_t>(k), 0);
  stats.selection_active = selection_active;
  double loss_sum = 0.0;

  std::vector<int> observed;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const IndexList& batch = batches[b];
    const BatchMatrix inputs = gather_inputs(train.features, batch);
    const ConfidenceMatrix confidences = predict_confidences(state.params, inputs);

    observed.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) observed[i] = train.observed_labels[batch[i]];
    if (stacking) stack_confidences(state.accumulator, confidences, observed);

    SelectionOutcome selection;
    if (selection_active) {
      selection = select_top_r(score_batch(confidences, observed, config.criteria, state.penalty),
                               config.select_percent, config.criteria.variant);
    } else {
      selection.selected_indices.resize(batch.size());
      std::iota(selection.selected_indices.begin(), selection.selected_indices.end(), std::size_t{0});
      selection.criteria_used = CriteriaVariant::None;
    }
    if (observer) observer({epoch, b, &batch, &selection, selection_active});

    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      targets(observed[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    BackwardResult grad = backward(state.params, inputs, targets, selection.selected_indices, config.loss);
    sgd_momentum_step(state.params, state.optimizer, grad.gradients, epoch);

    loss_sum += grad.mean_loss * static_cast<double>(selection.selected_indices.size());
    for (auto pos : selection.selected_indices) {
      const auto idx = batch[pos];
      ++stats.selected;
      stats.clean_selected += train.clean_mask[idx];
      ++stats.selected_per_class[static_cast<std::size_t>(train.observed_labels[idx])];
    }
  }

  if (!stacking) {
    state.accumulator.reset();
    stack_confidences(state.accumulator, predict_all(state.params, train.features),
                      train.observed_labels);
  }
  state.penalty = estimate_penalty_labels(state.accumulator, static_cast<std::int64_t>(epoch));
  state.accumulator.reset();

  stats.precision = stats.selected ? static_cast<double>(stats.clean_selected) /
                                         static_cast<double>(stats.selected)
                                   : 0.0;
  stats.mean_loss = stats.selected ? loss_sum / static_cast<double>(stats.selected) : 0.0;
  return stats;
}

std::vector<int> predict_labels(const ModelParams& params, const FeatureMatrix& features) {
  const ConfidenceMatrix probs = predict_all(params, features);
  std::vector<int> labels(static_cast<std::size_t>(probs.cols()));
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    Eigen::Index best = 0;
    probs.col(c).maxCoeff(&best);
    labels[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return labels;
}

double evaluate_test_error(const ModelParams& params, const LabeledDataset& test) {
  return test_error(predict_labels(params, test.features), test.true_labels);
}

RunResult train_run(const TrainConfig& config, const LabeledDataset& train,
                    const LabeledDataset& test, const RunOptions& options) {
  config.validate();
  train.validate();
  test.validate();
  if (train.dim() != test.dim() || train.k != test.k) {
    throw InvalidArgument("train and test sets disagree on dimension or class count", "dataset");
  }

  TrainState state = init_train_state(config, static_cast<int>(train.dim()), train.k);
  RunResult result;
  result.records.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const EpochStats stats = train_epoch(state, train, config, epoch, options.observer);
    RunRecord record;
    record.epoch = epoch;
    record.test_error = evaluate_test_error(state.params, test);
    record.precision = stats.precision;
    record.train_selected = stats.selected;
    record.selected_per_class = stats.selected_per_class;
    record.lambda = config.criteria.lambda;
    record.seed = config.seed;
    record.variant = config.criteria.variant;
    record.selection_active = stats.selection_active;
    result.records.push_back(std::move(record));
    if (options.keep_penalty_history) result.penalty_history.push_back(state.penalty);
  }
  result.best_test_error = best_test_error(result.records);
  result.final_test_error = result.records.back().test_error;
  result.final_precision = result.records.back().precision;
  result.final_params = std::move(state.params);
  return result;
}

RunResult run_experiment(const TrainConfig& config, const LabeledDataset& train_clean,
                         const LabeledDataset& test, const NoiseSpec& noise,
                         const RunOptions& options) {
  const TransitionMatrix matrix = build_transition(noise, train_clean.k);
  const LabeledDataset noisy = corrupt_labels(train_clean, matrix, SeedStreams::from(config.seed).noise);
  return train_run(config, noisy, test, options);
}

}  // namespace noisylab
