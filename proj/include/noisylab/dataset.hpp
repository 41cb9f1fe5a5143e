#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace noisylab {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexList = std::vector<std::size_t>;

// Samples with features, the true labels (used only for metrics) and the
// observed labels the trainer sees. clean_mask[i] == (true == observed).
struct LabeledDataset {
  FeatureMatrix features;
  std::vector<int> true_labels;
  std::vector<int> observed_labels;
  std::vector<bool> clean_mask;
  int k = 0;

  std::size_t size() const { return true_labels.size(); }
  Eigen::Index dim() const { return features.cols(); }

  // Replaces the observed labels and recomputes clean_mask.
  void set_observed(std::vector<int> observed);

  // Throws InvalidArgument if any documented invariant is broken.
  void validate() const;

  std::vector<std::size_t> observed_histogram() const;
  double clean_fraction() const;
};

// Builds a dataset whose observed labels equal its true labels.
LabeledDataset make_clean_dataset(FeatureMatrix features, std::vector<int> labels, int k);

struct BlobSpec {
  std::size_t n_per_class = 500;
  int k = 10;
  int d = 2;
  double separation = 6.0;
  double spread = 1.0;
};

// k isotropic Gaussian clusters. Class centers sit on a circle in the first
// two coordinates with radius chosen so adjacent centers are `separation`
// apart; for d == 1 they sit on a line with spacing `separation`. Remaining
// coordinates have center 0 and carry the same per-coordinate spread.
// Samples are emitted class-major (all of class 0, then class 1, ...).
LabeledDataset make_blobs(std::size_t n_per_class, int k, int d, double separation,
                          double spread, std::uint64_t seed);
LabeledDataset make_blobs(const BlobSpec& spec, std::uint64_t seed);

// Center of class `label` under the make_blobs layout.
Eigen::VectorXd blob_center(int label, int k, int d, double separation);

// Per-feature affine map fitted on a training set: x -> (x - mean) / scale.
// Constant features keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const FeatureMatrix& features);
  void apply(FeatureMatrix& features) const;
};

// A fresh seeded permutation per (seed, epoch), cut into consecutive batches.
// The final batch holds the remainder and may be smaller.
std::vector<IndexList> epoch_batches(std::size_t n, std::size_t batch_size,
                                     std::uint64_t seed, std::size_t epoch);
std::vector<IndexList> epoch_batches(const LabeledDataset& dataset, std::size_t batch_size,
                                     std::uint64_t seed, std::size_t epoch);

}  // namespace noisylab
