#include "noisylab/metrics.hpp"

#include "noisylab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace noisylab {

double test_error(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.empty()) throw InvalidArgument("test_error needs at least one prediction", "predictions");
  if (predictions.size() != truth.size()) {
    throw InvalidArgument("prediction/truth length mismatch", "predictions");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == truth[i];
  return 1.0 - static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double selection_precision(std::span<const std::size_t> selected, const std::vector<bool>& clean_mask) {
  if (selected.empty()) throw InvalidArgument("selection_precision needs a non-empty selection", "selected");
  std::size_t clean = 0;
  for (auto idx : selected) {
    if (idx >= clean_mask.size()) throw InvalidArgument("selected index out of range", "selected");
    clean += clean_mask[idx];
  }
  return static_cast<double>(clean) / static_cast<double>(selected.size());
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean_and_se needs at least one value", "values");
  MeanSe out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto n = static_cast<double>(values.size());
  out.mean = sum / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<EpochAggregate> aggregate_trials(const std::vector<std::vector<RunRecord>>& trials) {
  if (trials.empty()) return {};
  const auto epochs = trials.front().size();
  for (const auto& t : trials) {
    if (t.size() != epochs) throw InvalidArgument("trials have different lengths", "records");
  }
  std::vector<EpochAggregate> out;
  out.reserve(epochs);
  std::vector<double> errors(trials.size());
  std::vector<double> precisions(trials.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t t = 0; t < trials.size(); ++t) {
      errors[t] = trials[t][e].test_error;
      precisions[t] = trials[t][e].precision;
    }
    out.push_back({trials.front()[e].epoch, mean_and_se(errors), mean_and_se(precisions)});
  }
  return out;
}

double best_test_error(const std::vector<RunRecord>& records) {
  if (records.empty()) throw InvalidArgument("no records", "records");
  double best = records.front().test_error;
  for (const auto& r : records) best = std::min(best, r.test_error);
  return best;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return {buf, static_cast<std::size_t>(len)};
}

std::string format_shortest(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, result.ptr};
}

void write_metrics_csv(std::ostream& out, const std::vector<LabeledRun>& runs, int k) {
  out << "run_id,seed,variant,lambda,epoch,train_selected,precision,test_error";
  for (int c = 0; c < k; ++c) out << ",selected_class_" << c;
  out << '\n';
  for (const auto& run : runs) {
    for (const auto& r : *run.records) {
      out << run.run_id << ',' << r.seed << ',' << to_string(r.variant) << ','
          << format_shortest(r.lambda) << ',' << r.epoch << ',' << r.train_selected << ','
          << format_fixed(r.precision) << ',' << format_fixed(r.test_error);
      for (int c = 0; c < k; ++c) {
        out << ',' << (static_cast<std::size_t>(c) < r.selected_per_class.size()
                           ? r.selected_per_class[static_cast<std::size_t>(c)]
                           : 0);
      }
      out << '\n';
    }
  }
}

void write_penalty_csv(std::ostream& out, const PenaltyLabelSet& penalty) {
  for (int r = 0; r < penalty.k(); ++r) {
    for (int c = 0; c < penalty.k(); ++c) {
      if (c) out << ',';
      out << format_fixed(penalty.labels(r, c), 9);
    }
    out << '\n';
  }
}

}  // namespace noisylab
