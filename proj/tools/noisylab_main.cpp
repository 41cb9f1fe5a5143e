// noisylab: run noisy-label sample-selection experiments from a JSON config.
//
//   noisylab run          --config cfg.json [--set key=value]... [--out DIR] [--seeds 1,2,3]
//   noisylab sweep-lambda --config cfg.json --lambdas 0,0.5,1,1.5,2 [...]
//   noisylab compare      --config cfg.json --variants OL,PL,ALL --strategies stacked,repredict [...]
//
// Errors print one line "noisylab: error[CODE]: message" and exit with:
//   2 USAGE, 3 CONFIG_PARSE, 4 INVALID_SPEC, 5 NUMERICAL_FAULT, 6 IO

#include "noisylab/config.hpp"
#include "noisylab/errors.hpp"
#include "noisylab/experiment.hpp"
#include "noisylab/idx.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kConfigParse = 3, kInvalidSpec = 4, kNumericalFault = 5, kIo = 6 };

int fail(ExitCode code, const char* tag, const std::string& message) {
  std::string flat = message;
  for (auto& ch : flat) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "noisylab: error[" << tag << "]: " << flat << '\n';
  return code;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_lambdas(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_list(csv)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("lambda '" + item + "' is not a number");
    }
    if (used != item.size()) throw UsageError("lambda '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--lambdas needs at least one value");
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_names(const std::string& csv, const char* flag, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(csv)) {
    try {
      out.push_back(parse(item));
    } catch (const noisylab::InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy-label sample selection with class-wise penalty labels"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string seeds_csv;
  unsigned jobs = 1;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--set", overrides, "Override a config value: dotted.key=value (repeatable)");
    cmd->add_option("--out", out_dir, "Output directory (default: output.dir, $NOISYLAB_OUT, ./noisylab_out)");
    cmd->add_option("--seeds", seeds_csv, "Comma-separated trial seeds");
    cmd->add_option("--jobs", jobs, "Runs executed in parallel")->check(CLI::PositiveNumber);
  };

  auto* run_cmd = app.add_subcommand("run", "Run the configured experiment for every seed");
  add_common(run_cmd);

  std::string lambdas_csv;
  auto* sweep_cmd = app.add_subcommand("sweep-lambda", "One run per lambda with shared seeds");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--lambdas", lambdas_csv, "Comma-separated lambda values")->required();

  std::string variants_csv = "OL,PL,ALL";
  std::string strategies_csv = "stacked";
  auto* compare_cmd = app.add_subcommand("compare", "Variants x penalty-update strategies");
  add_common(compare_cmd);
  compare_cmd->add_option("--variants", variants_csv, "Criteria variants (None, OL, PL, ALL)");
  compare_cmd->add_option("--strategies", strategies_csv, "Penalty updates (stacked, repredict)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "USAGE", e.what());
  }

  try {
    noisylab::ExperimentConfig config = noisylab::load_config(config_path, overrides);
    if (!seeds_csv.empty()) config.seeds = noisylab::parse_seed_list(seeds_csv);

    std::vector<noisylab::PlannedRun> plan;
    std::string command;
    if (*run_cmd) {
      command = "run";
      plan = noisylab::plan_single(config);
    } else if (*sweep_cmd) {
      command = "sweep-lambda";
      plan = noisylab::plan_lambda_sweep(config, parse_lambdas(lambdas_csv));
    } else {
      command = "compare";
      plan = noisylab::plan_compare(
          config,
          parse_names<noisylab::CriteriaVariant>(variants_csv, "--variants",
                                                 noisylab::parse_criteria_variant),
          parse_names<noisylab::PenaltyUpdate>(strategies_csv, "--strategies",
                                               noisylab::parse_penalty_update));
    }

    const auto dir = noisylab::resolve_output_dir(config, out_dir);
    const auto data = noisylab::load_data(config.dataset);
    const auto results = noisylab::execute_plan(config, data, std::move(plan), jobs, config.output.penalty_csv);
    noisylab::write_outputs(dir, config, results, command);
    std::cout << "wrote " << results.runs.size() << " run(s) to " << dir.string() << '\n';
    return kOk;
  } catch (const UsageError& e) {
    return fail(kUsage, "USAGE", e.what());
  } catch (const noisylab::ConfigError& e) {
    return fail(kConfigParse, "CONFIG_PARSE", e.what());
  } catch (const noisylab::InvalidArgument& e) {
    std::string msg = e.what();
    if (!e.field().empty()) msg = e.field() + ": " + msg;
    return fail(kInvalidSpec, "INVALID_SPEC", msg);
  } catch (const noisylab::NumericalFault& e) {
    return fail(kNumericalFault, "NUMERICAL_FAULT", e.what());
  } catch (const noisylab::IdxError& e) {
    return fail(kIo, "IO", e.what());
  } catch (const std::exception& e) {
    return fail(kIo, "IO", e.what());
  }
}
