#pragma once

#include "noisylab/classifier.hpp"
#include "noisylab/criteria.hpp"
#include "noisylab/dataset.hpp"
#include "noisylab/losses.hpp"
#include "noisylab/metrics.hpp"
#include "noisylab/noise_model.hpp"
#include "noisylab/selection.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace noisylab {

// StackedPerIteration accumulates the mini-batch confidences computed during
// training (temporal ensemble). RepredictAtEpochEnd runs one extra forward
// pass over the training set after the last batch.
enum class PenaltyUpdate { StackedPerIteration, RepredictAtEpochEnd };

std::string_view to_string(PenaltyUpdate update);
PenaltyUpdate parse_penalty_update(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t warmup_epochs = 25;
  std::size_t batch_size = 128;
  double select_percent = 100.0;  // R; normally 100 - noise percent
  CriteriaConfig criteria;
  PenaltyUpdate penalty_update = PenaltyUpdate::StackedPerIteration;
  LossSpec loss;
  std::vector<int> hidden{64, 64};
  double momentum = 0.9;
  LrSchedule schedule;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SeedStreams {
  std::uint64_t noise;
  std::uint64_t init;
  std::uint64_t shuffle;

  static SeedStreams from(std::uint64_t seed);
};

struct TrainState {
  ModelParams params;
  OptimizerState optimizer;
  ConfidenceAccumulator accumulator;
  // Consumed during the current epoch; produced at the end of the previous one.
  PenaltyLabelSet penalty;
};

TrainState init_train_state(const TrainConfig& config, int input_dim, int k);

// Per-batch view handed to an observer (tests, diagnostics).
struct BatchTrace {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  const IndexList* indices = nullptr;          // dataset indices of this batch
  const SelectionOutcome* selection = nullptr;  // positions into `indices`
  bool selection_active = false;
};
using BatchObserver = std::function<void(const BatchTrace&)>;

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t selected = 0;
  std::size_t clean_selected = 0;
  std::vector<std::size_t> selected_per_class;
  double precision = 0.0;
  double mean_loss = 0.0;
  bool selection_active = false;
};

// Scores each sample of a batch under `variant`. Higher is kept.
std::vector<double> score_batch(const Eigen::Ref<const ConfidenceMatrix>& confidences,
                                std::span<const int> observed, const CriteriaConfig& criteria,
                                const PenaltyLabelSet& penalty);

EpochStats train_epoch(TrainState& state, const LabeledDataset& train, const TrainConfig& config,
                       std::size_t epoch, const BatchObserver& observer = {});

// Argmax per sample, lowest index on ties.
std::vector<int> predict_labels(const ModelParams& params, const FeatureMatrix& features);
double evaluate_test_error(const ModelParams& params, const LabeledDataset& test);

struct RunOptions {
  bool keep_penalty_history = false;
  BatchObserver observer;
};

struct RunResult {
  std::vector<RunRecord> records;
  double best_test_error = 1.0;
  double final_test_error = 1.0;
  double final_precision = 0.0;
  // Estimate produced at the end of each epoch (when requested).
  std::vector<PenaltyLabelSet> penalty_history;
  ModelParams final_params;
};

// Trains on an already-corrupted training set.
RunResult train_run(const TrainConfig& config, const LabeledDataset& train,
                    const LabeledDataset& test, const RunOptions& options = {});

// Corrupts `train_clean` with `noise` (seeded from config.seed), then trains.
RunResult run_experiment(const TrainConfig& config, const LabeledDataset& train_clean,
                         const LabeledDataset& test, const NoiseSpec& noise,
                         const RunOptions& options = {});

}  // namespace noisylab
