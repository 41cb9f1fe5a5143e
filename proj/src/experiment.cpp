#include "noisylab/experiment.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/idx.hpp"
#include "noisylab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace noisylab {

using nlohmann::json;

std::string RunKey::id() const {
  std::string out;
  out += to_string(variant);
  out += '-';
  out += to_string(update);
  out += '-';
  out += to_string(loss);
  out += "-lambda" + format_shortest(lambda);
  out += "-seed" + std::to_string(seed);
  return out;
}

namespace {

PlannedRun make_run(const TrainConfig& base, std::uint64_t seed) {
  PlannedRun run{{}, base};
  run.train.seed = seed;
  run.key = {base.criteria.variant, base.penalty_update, base.loss.kind, base.criteria.lambda, seed};
  return run;
}

}  // namespace

std::vector<PlannedRun> plan_single(const ExperimentConfig& config) {
  std::vector<PlannedRun> plan;
  for (auto seed : config.seeds) plan.push_back(make_run(config.train, seed));
  return plan;
}

std::vector<PlannedRun> plan_lambda_sweep(const ExperimentConfig& config, const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw InvalidArgument("lambda sweep needs at least one lambda", "lambdas");
  std::vector<PlannedRun> plan;
  for (double lambda : lambdas) {
    TrainConfig t = config.train;
    t.criteria.lambda = lambda;
    t.criteria.validate();
    for (auto seed : config.seeds) plan.push_back(make_run(t, seed));
  }
  return plan;
}

std::vector<PlannedRun> plan_compare(const ExperimentConfig& config,
                                     const std::vector<CriteriaVariant>& variants,
                                     const std::vector<PenaltyUpdate>& updates) {
  if (variants.empty()) throw InvalidArgument("compare needs at least one variant", "variants");
  if (updates.empty()) throw InvalidArgument("compare needs at least one update strategy", "strategies");
  std::vector<PlannedRun> plan;
  for (auto variant : variants) {
    for (auto update : updates) {
      TrainConfig t = config.train;
      t.criteria.variant = variant;
      t.penalty_update = update;
      for (auto seed : config.seeds) plan.push_back(make_run(t, seed));
    }
  }
  return plan;
}

namespace {

DataSplit load_raw(const DatasetConfig& config) {
  if (config.idx) {
    DataSplit split{load_idx(config.idx->train_images, config.idx->train_labels, config.idx->normalize),
                    load_idx(config.idx->test_images, config.idx->test_labels, config.idx->normalize)};
    const int k = std::max(split.train.k, split.test.k);
    split.train.k = k;
    split.test.k = k;
    if (split.train.dim() != split.test.dim()) {
      throw InvalidArgument("IDX train and test images differ in size", "dataset.idx");
    }
    return split;
  }
  BlobSpec test_spec = config.blobs;
  test_spec.n_per_class = config.test_per_class;
  return {make_blobs(config.blobs, config.seed), make_blobs(test_spec, derive_seed(config.seed, 1))};
}

}  // namespace

DataSplit load_data(const DatasetConfig& config) {
  DataSplit split = load_raw(config);
  if (config.standardize) {
    const auto s = Standardizer::fit(split.train.features);
    s.apply(split.train.features);
    s.apply(split.test.features);
  }
  return split;
}

ExperimentResults execute_plan(const ExperimentConfig& config, const DataSplit& data,
                               std::vector<PlannedRun> plan, unsigned jobs, bool keep_penalty_history) {
  std::sort(plan.begin(), plan.end(),
            [](const PlannedRun& a, const PlannedRun& b) { return a.key < b.key; });
  for (std::size_t i = 1; i < plan.size(); ++i) {
    if (!(plan[i - 1].key < plan[i].key)) {
      throw InvalidArgument("duplicate run " + plan[i].key.id() + " in plan", "seeds");
    }
  }

  ExperimentResults results;
  results.k = data.train.k;
  results.runs.resize(plan.size());
  RunOptions options;
  options.keep_penalty_history = keep_penalty_history;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      try {
        RunResult r = run_experiment(plan[i].train, data.train, data.test, config.noise, options);
        results.runs[i] = {plan[i].key, plan[i].train, std::move(r)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = plan.size();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

void write_metrics(std::ostream& out, const ExperimentResults& results) {
  std::vector<std::string> ids;
  ids.reserve(results.runs.size());
  for (const auto& run : results.runs) ids.push_back(run.key.id());
  std::vector<LabeledRun> labeled;
  for (std::size_t i = 0; i < results.runs.size(); ++i) {
    labeled.push_back({ids[i], &results.runs[i].result.records});
  }
  write_metrics_csv(out, labeled, results.k);
}

namespace {

json mean_se_json(const std::vector<double>& values) {
  const MeanSe m = mean_and_se(values);
  json j = {{"mean", m.mean}};
  j["se"] = m.standard_error ? json(*m.standard_error) : json(nullptr);
  return j;
}

}  // namespace

json summarize(const ExperimentConfig& config, const ExperimentResults& results) {
  json runs = json::array();
  struct Group {
    RunKey key;
    std::vector<double> best, final_error, final_precision;
  };
  std::map<std::tuple<CriteriaVariant, PenaltyUpdate, LossKind, double>, Group> groups;
  for (const auto& run : results.runs) {
    const auto& r = run.result;
    runs.push_back({{"run_id", run.key.id()},
                    {"variant", std::string(to_string(run.key.variant))},
                    {"penalty_update", std::string(to_string(run.key.update))},
                    {"loss", std::string(to_string(run.key.loss))},
                    {"lambda", run.key.lambda},
                    {"seed", run.key.seed},
                    {"best_test_error", r.best_test_error},
                    {"final_test_error", r.final_test_error},
                    {"final_precision", r.final_precision}});
    auto& g = groups[{run.key.variant, run.key.update, run.key.loss, run.key.lambda}];
    g.key = run.key;
    g.best.push_back(r.best_test_error);
    g.final_error.push_back(r.final_test_error);
    g.final_precision.push_back(r.final_precision);
  }
  json aggregates = json::array();
  for (const auto& [_, g] : groups) {
    aggregates.push_back({{"variant", std::string(to_string(g.key.variant))},
                          {"penalty_update", std::string(to_string(g.key.update))},
                          {"loss", std::string(to_string(g.key.loss))},
                          {"lambda", g.key.lambda},
                          {"trials", g.best.size()},
                          {"best_test_error", mean_se_json(g.best)},
                          {"final_test_error", mean_se_json(g.final_error)},
                          {"final_precision", mean_se_json(g.final_precision)}});
  }
  return {{"noise",
           {{"kind", std::string(to_string(config.noise.kind))},
            {"epsilon", config.noise.epsilon},
            {"epsilon1", config.noise.epsilon1},
            {"epsilon2", config.noise.epsilon2}}},
          {"k", results.k},
          {"runs", runs},
          {"aggregates", aggregates}};
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (!config.output.dir.empty()) return config.output.dir;
  if (const char* env = std::getenv("NOISYLAB_OUT"); env && *env) return env;
  return "noisylab_out";
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const ExperimentResults& results, const std::string& command) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "metrics.csv");
    write_metrics(out, results);
  }
  {
    auto out = open_output(dir / "summary.json");
    out << summarize(config, results).dump(2) << '\n';
  }
  {
    auto out = open_output(dir / "run.log");
    out << timestamp() << " command=" << command << " runs=" << results.runs.size() << '\n';
    out << "config " << to_json(config).dump() << '\n';
    for (const auto& run : results.runs) {
      out << timestamp() << " finished " << run.key.id() << " best_test_error="
          << format_fixed(run.result.best_test_error) << '\n';
    }
  }
  if (config.output.penalty_csv) {
    for (const auto& run : results.runs) {
      const auto run_dir = dir / "penalty" / run.key.id();
      std::filesystem::create_directories(run_dir);
      for (const auto& penalty : run.result.penalty_history) {
        std::ostringstream name;
        name << "epoch_" << std::setw(3) << std::setfill('0') << penalty.epoch_of_estimate << ".csv";
        auto out = open_output(run_dir / name.str());
        write_penalty_csv(out, penalty);
      }
    }
  }
  if (config.output.checkpoint) {
    std::filesystem::create_directories(dir / "checkpoints");
    for (const auto& run : results.runs) {
      save_checkpoint(run.result.final_params, dir / "checkpoints" / (run.key.id() + ".bin"));
    }
  }
}

}  // namespace noisylab
