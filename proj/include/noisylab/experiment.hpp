#pragma once

#include "noisylab/config.hpp"
#include "noisylab/trainer.hpp"

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

namespace noisylab {

struct RunKey {
  CriteriaVariant variant = CriteriaVariant::ALL;
  PenaltyUpdate update = PenaltyUpdate::StackedPerIteration;
  LossKind loss = LossKind::CE;
  double lambda = 1.0;
  std::uint64_t seed = 1;

  // e.g. "ALL-stacked-CE-lambda1-seed3"
  std::string id() const;
  auto tie() const { return std::tuple(variant, update, loss, lambda, seed); }
  bool operator<(const RunKey& other) const { return tie() < other.tie(); }
};

struct PlannedRun {
  RunKey key;
  TrainConfig train;
};

// One run per seed with the configured train section.
std::vector<PlannedRun> plan_single(const ExperimentConfig& config);
// One run per (lambda, seed); throws InvalidArgument on an empty list.
std::vector<PlannedRun> plan_lambda_sweep(const ExperimentConfig& config, const std::vector<double>& lambdas);
// Cartesian product variants x updates x seeds.
std::vector<PlannedRun> plan_compare(const ExperimentConfig& config,
                                     const std::vector<CriteriaVariant>& variants,
                                     const std::vector<PenaltyUpdate>& updates);

struct DataSplit {
  LabeledDataset train;  // clean labels
  LabeledDataset test;
};

DataSplit load_data(const DatasetConfig& config);

struct CompletedRun {
  RunKey key;
  TrainConfig train;
  RunResult result;
};

struct ExperimentResults {
  int k = 0;
  std::vector<CompletedRun> runs;  // sorted by RunKey
};

// Executes the plan; with jobs > 1 runs proceed on worker threads. Output
// order is by RunKey regardless of completion order.
ExperimentResults execute_plan(const ExperimentConfig& config, const DataSplit& data,
                               std::vector<PlannedRun> plan, unsigned jobs = 1,
                               bool keep_penalty_history = false);

void write_metrics(std::ostream& out, const ExperimentResults& results);
nlohmann::json summarize(const ExperimentConfig& config, const ExperimentResults& results);

// Writes metrics.csv, summary.json, run.log and the optional penalty /
// checkpoint dumps into `dir`.
void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const ExperimentResults& results, const std::string& command);

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& cli_out);

}  // namespace noisylab
