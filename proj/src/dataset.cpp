#include "noisylab/dataset.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace noisylab {

void LabeledDataset::set_observed(std::vector<int> observed) {
  if (observed.size() != true_labels.size()) {
    throw InvalidArgument("observed label count does not match sample count", "observed_labels");
  }
  observed_labels = std::move(observed);
  clean_mask.assign(true_labels.size(), false);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    clean_mask[i] = true_labels[i] == observed_labels[i];
  }
}

void LabeledDataset::validate() const {
  const auto n = size();
  if (n == 0) throw InvalidArgument("dataset is empty", "dataset");
  if (features.cols() <= 0) throw InvalidArgument("feature dimension must be positive", "dataset");
  if (static_cast<std::size_t>(features.rows()) != n || observed_labels.size() != n ||
      clean_mask.size() != n) {
    throw InvalidArgument("dataset field lengths disagree", "dataset");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (true_labels[i] < 0 || true_labels[i] >= k || observed_labels[i] < 0 ||
        observed_labels[i] >= k) {
      throw InvalidArgument("label out of range at sample " + std::to_string(i), "dataset");
    }
    if (clean_mask[i] != (true_labels[i] == observed_labels[i])) {
      throw InvalidArgument("clean_mask inconsistent at sample " + std::to_string(i), "dataset");
    }
  }
}

std::vector<std::size_t> LabeledDataset::observed_histogram() const {
  std::vector<std::size_t> hist(static_cast<std::size_t>(k), 0);
  for (int label : observed_labels) ++hist[static_cast<std::size_t>(label)];
  return hist;
}

double LabeledDataset::clean_fraction() const {
  if (size() == 0) return 0.0;
  const auto clean = std::count(clean_mask.begin(), clean_mask.end(), true);
  return static_cast<double>(clean) / static_cast<double>(size());
}

LabeledDataset make_clean_dataset(FeatureMatrix features, std::vector<int> labels, int k) {
  LabeledDataset ds;
  ds.features = std::move(features);
  ds.k = k;
  ds.true_labels = labels;
  ds.set_observed(std::move(labels));
  return ds;
}

Eigen::VectorXd blob_center(int label, int k, int d, double separation) {
  Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
  if (d == 1) {
    center(0) = separation * label;
    return center;
  }
  const double radius = separation / (2.0 * std::sin(std::numbers::pi / k));
  const double angle = 2.0 * std::numbers::pi * label / k;
  center(0) = radius * std::cos(angle);
  center(1) = radius * std::sin(angle);
  return center;
}

LabeledDataset make_blobs(std::size_t n_per_class, int k, int d, double separation,
                          double spread, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("blob dimension must be >= 1", "dataset.d");
  if (k < 2) throw InvalidArgument("blob class count must be >= 2", "dataset.k");
  if (n_per_class == 0) throw InvalidArgument("n_per_class must be positive", "dataset.n_per_class");
  if (!(separation > 0.0)) throw InvalidArgument("separation must be positive", "dataset.separation");
  if (!(spread > 0.0)) throw InvalidArgument("spread must be positive", "dataset.spread");

  Rng rng(seed);
  const auto n = n_per_class * static_cast<std::size_t>(k);
  FeatureMatrix features(static_cast<Eigen::Index>(n), d);
  std::vector<int> labels(n);
  std::size_t row = 0;
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd center = blob_center(c, k, d, separation);
    for (std::size_t s = 0; s < n_per_class; ++s, ++row) {
      for (int j = 0; j < d; ++j) {
        features(static_cast<Eigen::Index>(row), j) = center(j) + spread * rng.normal();
      }
      labels[row] = c;
    }
  }
  return make_clean_dataset(std::move(features), std::move(labels), k);
}

LabeledDataset make_blobs(const BlobSpec& spec, std::uint64_t seed) {
  return make_blobs(spec.n_per_class, spec.k, spec.d, spec.separation, spec.spread, seed);
}

Standardizer Standardizer::fit(const FeatureMatrix& features) {
  if (features.rows() == 0) throw InvalidArgument("cannot standardize an empty feature matrix", "dataset");
  Standardizer s;
  s.mean = features.colwise().mean();
  s.scale.resize(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - s.mean(j)).square().mean();
    s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

void Standardizer::apply(FeatureMatrix& features) const {
  if (features.cols() != mean.size()) {
    throw InvalidArgument("standardizer width does not match features", "dataset");
  }
  features.rowwise() -= mean;
  features.array().rowwise() /= scale.array();
}

std::vector<IndexList> epoch_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                     std::size_t epoch) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1", "train.batch_size");
  IndexList order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, epoch));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<IndexList> batches;
  batches.reserve((n + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const auto stop = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return batches;
}

std::vector<IndexList> epoch_batches(const LabeledDataset& dataset, std::size_t batch_size,
                                     std::uint64_t seed, std::size_t epoch) {
  return epoch_batches(dataset.size(), batch_size, seed, epoch);
}

}  // namespace noisylab
