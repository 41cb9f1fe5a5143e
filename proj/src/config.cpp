#include "noisylab/config.hpp"

#include "noisylab/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace noisylab {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, const std::string& path, std::set<std::string> allowed) {
  if (!section.is_object()) throw ConfigError("section '" + path + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown config key '" + (path.empty() ? key : path + "." + key) + "'");
    }
  }
}

template <typename T>
T read(const json& section, const std::string& key, const std::string& path, T fallback) {
  if (!section.contains(key) || section.at(key).is_null()) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + path + "." + key + "' has the wrong type");
  }
}

std::size_t read_count(const json& section, const std::string& key, const std::string& path,
                       std::size_t fallback) {
  if (!section.contains(key) || section.at(key).is_null()) return fallback;
  const auto& v = section.at(key);
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::size_t>();
  if (v.is_number_integer()) throw InvalidArgument(path + "." + key + " must be >= 0", path + "." + key);
  throw ConfigError("config key '" + path + "." + key + "' must be an integer");
}

DatasetConfig parse_dataset(const json& j) {
  reject_unknown(j, "dataset", {"type", "n_per_class", "test_per_class", "k", "d", "separation",
                                "spread", "seed", "standardize", "idx"});
  DatasetConfig ds;
  const auto type = read<std::string>(j, "type", "dataset", j.contains("idx") ? "idx" : "blobs");
  ds.blobs.n_per_class = read_count(j, "n_per_class", "dataset", ds.blobs.n_per_class);
  ds.test_per_class = read_count(j, "test_per_class", "dataset", ds.test_per_class);
  ds.blobs.k = read<int>(j, "k", "dataset", ds.blobs.k);
  ds.blobs.d = read<int>(j, "d", "dataset", ds.blobs.d);
  ds.blobs.separation = read<double>(j, "separation", "dataset", ds.blobs.separation);
  ds.blobs.spread = read<double>(j, "spread", "dataset", ds.blobs.spread);
  ds.seed = read<std::uint64_t>(j, "seed", "dataset", ds.seed);
  ds.standardize = read<bool>(j, "standardize", "dataset", ds.standardize);
  if (type == "idx") {
    if (!j.contains("idx")) throw ConfigError("dataset.type is idx but dataset.idx is missing");
    const json& idx = j.at("idx");
    reject_unknown(idx, "dataset.idx",
                   {"train_images", "train_labels", "test_images", "test_labels", "normalize"});
    IdxPaths paths;
    paths.train_images = read<std::string>(idx, "train_images", "dataset.idx", "");
    paths.train_labels = read<std::string>(idx, "train_labels", "dataset.idx", "");
    paths.test_images = read<std::string>(idx, "test_images", "dataset.idx", "");
    paths.test_labels = read<std::string>(idx, "test_labels", "dataset.idx", "");
    paths.normalize = read<bool>(idx, "normalize", "dataset.idx", true);
    ds.idx = paths;
  } else if (type != "blobs") {
    throw InvalidArgument("dataset.type must be 'blobs' or 'idx'", "dataset.type");
  }
  return ds;
}

NoiseSpec parse_noise(const json& j) {
  reject_unknown(j, "noise", {"kind", "epsilon", "epsilon1", "epsilon2"});
  NoiseSpec spec;
  spec.kind = parse_noise_kind(read<std::string>(j, "kind", "noise", "pair"));
  spec.epsilon1 = read<double>(j, "epsilon1", "noise", 0.0);
  spec.epsilon2 = read<double>(j, "epsilon2", "noise", 0.0);
  const double fallback = spec.kind == NoiseKind::Mixed ? spec.epsilon1 + spec.epsilon2 : 0.0;
  spec.epsilon = read<double>(j, "epsilon", "noise", fallback);
  return spec;
}

TrainConfig parse_train(const json& j, const NoiseSpec& noise) {
  reject_unknown(j, "train", {"epochs", "warmup_epochs", "batch_size", "select_percent", "criteria",
                              "penalty_update", "loss", "sl", "hidden", "momentum", "lr",
                              "lr_milestones"});
  TrainConfig t;
  t.epochs = read_count(j, "epochs", "train", t.epochs);
  t.warmup_epochs = read_count(j, "warmup_epochs", "train", t.warmup_epochs);
  t.batch_size = read_count(j, "batch_size", "train", t.batch_size);
  t.select_percent = read<double>(j, "select_percent", "train", 100.0 * (1.0 - noise.epsilon));
  if (j.contains("criteria")) {
    const json& c = j.at("criteria");
    reject_unknown(c, "train.criteria", {"variant", "lambda"});
    t.criteria.variant = parse_criteria_variant(read<std::string>(c, "variant", "train.criteria", "ALL"));
    t.criteria.lambda = read<double>(c, "lambda", "train.criteria", t.criteria.lambda);
  }
  t.penalty_update = parse_penalty_update(read<std::string>(j, "penalty_update", "train", "stacked"));
  t.loss.kind = parse_loss_kind(read<std::string>(j, "loss", "train", "CE"));
  if (j.contains("sl")) {
    const json& s = j.at("sl");
    reject_unknown(s, "train.sl", {"preset", "alpha", "beta", "log_zero_clamp"});
    if (s.contains("preset")) t.loss.sl = sl_preset(read<std::string>(s, "preset", "train.sl", ""));
    t.loss.sl.alpha = read<double>(s, "alpha", "train.sl", t.loss.sl.alpha);
    t.loss.sl.beta = read<double>(s, "beta", "train.sl", t.loss.sl.beta);
    t.loss.sl.log_zero_clamp = read<double>(s, "log_zero_clamp", "train.sl", t.loss.sl.log_zero_clamp);
  }
  t.hidden = read<std::vector<int>>(j, "hidden", "train", t.hidden);
  t.momentum = read<double>(j, "momentum", "train", t.momentum);
  t.schedule.initial = read<double>(j, "lr", "train", t.schedule.initial);
  if (j.contains("lr_milestones")) {
    t.schedule.milestones.clear();
    for (const auto& m : j.at("lr_milestones")) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number()) {
        throw ConfigError("train.lr_milestones entries must be [epoch, multiplier]");
      }
      t.schedule.milestones.emplace_back(m[0].get<std::size_t>(), m[1].get<double>());
    }
  }
  return t;
}

OutputConfig parse_output(const json& j) {
  reject_unknown(j, "output", {"dir", "penalty_csv", "checkpoint"});
  OutputConfig o;
  o.dir = read<std::string>(j, "dir", "output", "");
  o.penalty_csv = read<bool>(j, "penalty_csv", "output", false);
  o.checkpoint = read<bool>(j, "checkpoint", "output", false);
  return o;
}

json parse_scalar(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override path '" + path + "' crosses a non-object");
      *node = json::object();
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_scalar(assignment.substr(eq + 1));
}

void ExperimentConfig::validate() const {
  if (!dataset.idx) {
    const auto& b = dataset.blobs;
    if (b.k < 2) throw InvalidArgument("dataset.k must be >= 2", "dataset.k");
    if (b.d < 1) throw InvalidArgument("dataset.d must be >= 1", "dataset.d");
    if (b.n_per_class == 0) throw InvalidArgument("dataset.n_per_class must be >= 1", "dataset.n_per_class");
    if (dataset.test_per_class == 0) {
      throw InvalidArgument("dataset.test_per_class must be >= 1", "dataset.test_per_class");
    }
    if (!(b.separation > 0.0)) throw InvalidArgument("dataset.separation must be > 0", "dataset.separation");
    if (!(b.spread > 0.0)) throw InvalidArgument("dataset.spread must be > 0", "dataset.spread");
    if (noise.kind == NoiseKind::Mixed && b.k < 3) {
      throw InvalidArgument("mixed noise needs dataset.k >= 3", "dataset.k");
    }
  }
  noise.validate();
  train.validate();
  if (seeds.empty()) throw InvalidArgument("at least one seed is required", "seeds");
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  for (const auto& o : overrides) apply_override(doc, o);
  reject_unknown(doc, "", {"dataset", "noise", "train", "output", "trials", "seeds"});

  ExperimentConfig cfg;
  cfg.dataset = parse_dataset(doc.value("dataset", json::object()));
  cfg.noise = parse_noise(doc.value("noise", json::object()));
  cfg.train = parse_train(doc.value("train", json::object()), cfg.noise);
  cfg.output = parse_output(doc.value("output", json::object()));

  const bool has_seeds = doc.contains("seeds") && !doc.at("seeds").is_null();
  const bool has_trials = doc.contains("trials") && !doc.at("trials").is_null();
  if (has_seeds) cfg.seeds = read<std::vector<std::uint64_t>>(doc, "seeds", "", {});
  if (has_trials) {
    const auto trials = read_count(doc, "trials", "", 1);
    if (!has_seeds) {
      cfg.seeds.clear();
      for (std::size_t t = 0; t < trials; ++t) cfg.seeds.push_back(t + 1);
    } else if (trials != cfg.seeds.size()) {
      throw InvalidArgument("trials (" + std::to_string(trials) + ") must equal the number of seeds (" +
                                std::to_string(cfg.seeds.size()) + ")",
                            "trials");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

json to_json(const ExperimentConfig& config) {
  json j;
  const auto& ds = config.dataset;
  if (ds.idx) {
    j["dataset"] = {{"type", "idx"},
                    {"idx",
                     {{"train_images", ds.idx->train_images.string()},
                      {"train_labels", ds.idx->train_labels.string()},
                      {"test_images", ds.idx->test_images.string()},
                      {"test_labels", ds.idx->test_labels.string()},
                      {"normalize", ds.idx->normalize}}}};
  } else {
    j["dataset"] = {{"type", "blobs"},          {"n_per_class", ds.blobs.n_per_class},
                    {"test_per_class", ds.test_per_class}, {"k", ds.blobs.k},
                    {"d", ds.blobs.d},          {"separation", ds.blobs.separation},
                    {"spread", ds.blobs.spread}, {"seed", ds.seed}};
  }
  j["dataset"]["standardize"] = ds.standardize;
  j["noise"] = {{"kind", std::string(to_string(config.noise.kind))},
                {"epsilon", config.noise.epsilon},
                {"epsilon1", config.noise.epsilon1},
                {"epsilon2", config.noise.epsilon2}};
  const auto& t = config.train;
  json milestones = json::array();
  for (const auto& [e, m] : t.schedule.milestones) milestones.push_back({e, m});
  j["train"] = {{"epochs", t.epochs},
                {"warmup_epochs", t.warmup_epochs},
                {"batch_size", t.batch_size},
                {"select_percent", t.select_percent},
                {"criteria", {{"variant", std::string(to_string(t.criteria.variant))}, {"lambda", t.criteria.lambda}}},
                {"penalty_update", std::string(to_string(t.penalty_update))},
                {"loss", std::string(to_string(t.loss.kind))},
                {"sl", {{"alpha", t.loss.sl.alpha}, {"beta", t.loss.sl.beta}, {"log_zero_clamp", t.loss.sl.log_zero_clamp}}},
                {"hidden", t.hidden},
                {"momentum", t.momentum},
                {"lr", t.schedule.initial},
                {"lr_milestones", milestones}};
  j["output"] = {{"dir", config.output.dir.string()},
                 {"penalty_csv", config.output.penalty_csv},
                 {"checkpoint", config.output.checkpoint}};
  j["seeds"] = config.seeds;
  j["trials"] = config.trials();
  return j;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InvalidArgument("empty entry in seed list", "seeds");
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("seed '" + item + "' is not a non-negative integer", "seeds");
    }
    if (used != item.size()) throw InvalidArgument("seed '" + item + "' is not a non-negative integer", "seeds");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw InvalidArgument("seed list is empty", "seeds");
  return seeds;
}

}  // namespace noisylab
