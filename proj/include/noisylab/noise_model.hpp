#pragma once

#include "noisylab/dataset.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace noisylab {

enum class NoiseKind { Pair, Symmetry, Mixed };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Pair;
  double epsilon = 0.0;
  // Mixed only: epsilon1 goes to the dominant class (i+1) mod K, epsilon2 is
  // spread uniformly over the remaining K-2 wrong classes.
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;

  static NoiseSpec pair(double epsilon);
  static NoiseSpec symmetry(double epsilon);
  static NoiseSpec mixed(double epsilon1, double epsilon2);

  void validate() const;
  // Symmetry noise above 0.6 is accepted but lies outside the tested range.
  bool outside_tested_range() const;
};

// Row-stochastic K x K matrix; row = true class, column = observed class.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int k);

  int k() const { return k_; }
  double operator()(int from, int to) const { return entries_(from, to); }
  double& operator()(int from, int to) { return entries_(from, to); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  bool is_row_stochastic(double tol = 1e-12) const;

 private:
  int k_;
  Eigen::MatrixXd entries_;
};

TransitionMatrix build_transition(const NoiseSpec& spec, int k);

// Draws each observed label independently from the row of its true label,
// visiting samples in index order with a single Rng stream. Returns a copy
// with observed labels and clean_mask replaced; true labels are untouched.
LabeledDataset corrupt_labels(const LabeledDataset& dataset, const TransitionMatrix& matrix,
                              std::uint64_t seed);

}  // namespace noisylab
