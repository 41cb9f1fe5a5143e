#pragma once

#include "noisylab/dataset.hpp"
#include "noisylab/noise_model.hpp"
#include "noisylab/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisylab {

// Malformed config text or an override that cannot be applied.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdxPaths {
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  bool normalize = true;
};

struct DatasetConfig {
  // Exactly one source: synthetic blobs (default) or IDX files.
  BlobSpec blobs;
  std::size_t test_per_class = 100;
  std::uint64_t seed = 7;
  // Fit a Standardizer on the training features and apply it to both splits.
  bool standardize = true;
  std::optional<IdxPaths> idx;
};

struct OutputConfig {
  std::filesystem::path dir;  // empty: $NOISYLAB_OUT, then "noisylab_out"
  bool penalty_csv = false;
  bool checkpoint = false;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  NoiseSpec noise;
  TrainConfig train;  // train.seed is replaced per trial
  OutputConfig output;
  std::vector<std::uint64_t> seeds{1};

  std::size_t trials() const { return seeds.size(); }
  void validate() const;
};

// Parses JSON text, applying "a.b.c=value" overrides first. Values parse as
// JSON when possible and as plain strings otherwise. Throws ConfigError for
// syntax/unknown keys and InvalidArgument for values violating invariants.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json to_json(const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(const std::string& csv);

}  // namespace noisylab
