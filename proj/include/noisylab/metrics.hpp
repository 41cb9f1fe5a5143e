#pragma once

#include "noisylab/criteria.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace noisylab {

// One row per epoch of one run.
struct RunRecord {
  std::size_t epoch = 0;
  double test_error = 0.0;
  // Clean fraction of the samples trained on this epoch. Before selection
  // activates every sample is trained on, so this is the clean rate.
  double precision = 0.0;
  std::size_t train_selected = 0;
  std::vector<std::size_t> selected_per_class;  // by observed label
  double lambda = 0.0;
  std::uint64_t seed = 0;
  CriteriaVariant variant = CriteriaVariant::None;
  bool selection_active = false;
};

double test_error(std::span<const int> predictions, std::span<const int> truth);
double selection_precision(std::span<const std::size_t> selected, const std::vector<bool>& clean_mask);

struct MeanSe {
  double mean = 0.0;
  std::optional<double> standard_error;  // absent for a single trial
};

// Mean and sample-sd / sqrt(T) (n - 1 denominator).
MeanSe mean_and_se(std::span<const double> values);

struct EpochAggregate {
  std::size_t epoch = 0;
  MeanSe test_error;
  MeanSe precision;
};

// Per-epoch mean +- standard error across trials; trials must have equal length.
std::vector<EpochAggregate> aggregate_trials(const std::vector<std::vector<RunRecord>>& trials);

double best_test_error(const std::vector<RunRecord>& records);

// Fixed-point rendering used by every CSV writer ('.' separator, C locale).
std::string format_fixed(double value, int digits = 6);
// Shortest round-trip rendering.
std::string format_shortest(double value);

struct LabeledRun {
  std::string run_id;
  const std::vector<RunRecord>* records = nullptr;
};

// Header: run_id,seed,variant,lambda,epoch,train_selected,precision,test_error,
//         selected_class_0..selected_class_{K-1}; LF line endings.
void write_metrics_csv(std::ostream& out, const std::vector<LabeledRun>& runs, int k);

// K rows x K columns, row k = m^k.
void write_penalty_csv(std::ostream& out, const PenaltyLabelSet& penalty);

}  // namespace noisylab
