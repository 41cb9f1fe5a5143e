#include "noisylab/noise_model.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/rng.hpp"

#include <cmath>
#include <string>

namespace noisylab {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Pair: return "pair";
    case NoiseKind::Symmetry: return "symmetry";
    case NoiseKind::Mixed: return "mixed";
  }
  return "?";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "pair") return NoiseKind::Pair;
  if (name == "symmetry" || name == "symmetric") return NoiseKind::Symmetry;
  if (name == "mixed") return NoiseKind::Mixed;
  throw InvalidArgument("unknown noise kind '" + std::string(name) +
                            "' (expected pair, symmetry or mixed)",
                        "noise.kind");
}

NoiseSpec NoiseSpec::pair(double epsilon) { return {NoiseKind::Pair, epsilon, 0.0, 0.0}; }

NoiseSpec NoiseSpec::symmetry(double epsilon) {
  return {NoiseKind::Symmetry, epsilon, 0.0, 0.0};
}

NoiseSpec NoiseSpec::mixed(double epsilon1, double epsilon2) {
  return {NoiseKind::Mixed, epsilon1 + epsilon2, epsilon1, epsilon2};
}

void NoiseSpec::validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon >= 1.0) {
    throw InvalidArgument("noise rate epsilon must lie in [0, 1), got " + std::to_string(epsilon),
                          "noise.epsilon");
  }
  if (kind == NoiseKind::Mixed) {
    if (!(epsilon1 >= 0.0)) throw InvalidArgument("epsilon1 must be >= 0", "noise.epsilon1");
    if (!(epsilon2 >= 0.0)) throw InvalidArgument("epsilon2 must be >= 0", "noise.epsilon2");
    if (std::abs(epsilon1 + epsilon2 - epsilon) > 1e-12) {
      throw InvalidArgument("mixed noise requires epsilon1 + epsilon2 == epsilon",
                            "noise.epsilon");
    }
  }
}

bool NoiseSpec::outside_tested_range() const {
  return kind == NoiseKind::Symmetry && epsilon > 0.6;
}

TransitionMatrix::TransitionMatrix(int k) : k_(k), entries_(Eigen::MatrixXd::Zero(k, k)) {}

bool TransitionMatrix::is_row_stochastic(double tol) const {
  if ((entries_.array() < 0.0).any() || (entries_.array() > 1.0).any()) return false;
  for (int i = 0; i < k_; ++i) {
    if (std::abs(entries_.row(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

TransitionMatrix build_transition(const NoiseSpec& spec, int k) {
  if (k < 2) throw InvalidArgument("class count must be >= 2", "k");
  spec.validate();
  if (spec.kind == NoiseKind::Mixed && k == 2) {
    throw InvalidArgument("mixed noise needs at least 3 classes", "k");
  }

  TransitionMatrix m(k);
  const double eps = spec.epsilon;
  for (int i = 0; i < k; ++i) {
    const int next = (i + 1) % k;
    switch (spec.kind) {
      case NoiseKind::Pair:
        m(i, next) = eps;
        break;
      case NoiseKind::Symmetry:
        for (int j = 0; j < k; ++j) m(i, j) = eps / (k - 1);
        break;
      case NoiseKind::Mixed:
        for (int j = 0; j < k; ++j) m(i, j) = spec.epsilon2 / (k - 2);
        m(i, next) = spec.epsilon1;
        break;
    }
    m(i, i) = 1.0 - eps;
  }
  return m;
}

LabeledDataset corrupt_labels(const LabeledDataset& dataset, const TransitionMatrix& matrix,
                              std::uint64_t seed) {
  if (matrix.k() != dataset.k) {
    throw InvalidArgument("transition matrix size does not match dataset class count", "k");
  }
  Rng rng(seed);
  std::vector<int> observed(dataset.size());
  const int k = matrix.k();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int truth = dataset.true_labels[i];
    if (truth < 0 || truth >= k) throw InvalidArgument("true label out of range", "true_labels");
    const double u = rng.uniform();
    double cumulative = 0.0;
    int drawn = k - 1;
    for (int j = 0; j < k; ++j) {
      cumulative += matrix(truth, j);
      if (u < cumulative) {
        drawn = j;
        break;
      }
    }
    // Guard against a cumulative sum ending a hair below 1 landing on a
    // zero-probability last column.
    if (matrix(truth, drawn) == 0.0) drawn = truth;
    observed[i] = drawn;
  }
  LabeledDataset out = dataset;
  out.set_observed(std::move(observed));
  return out;
}

}  // namespace noisylab
