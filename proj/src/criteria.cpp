#include "noisylab/criteria.hpp"

#include "noisylab/errors.hpp"
#include "noisylab/selection.hpp"

#include <cmath>
#include <string>

namespace noisylab {

std::string_view to_string(CriteriaVariant variant) {
  switch (variant) {
    case CriteriaVariant::None: return "None";
    case CriteriaVariant::OL: return "OL";
    case CriteriaVariant::PL: return "PL";
    case CriteriaVariant::ALL: return "ALL";
  }
  return "?";
}

CriteriaVariant parse_criteria_variant(std::string_view name) {
  if (name == "None" || name == "none" || name == "Default" || name == "default") {
    return CriteriaVariant::None;
  }
  if (name == "OL" || name == "ol" || name == "MentorNet") return CriteriaVariant::OL;
  if (name == "PL" || name == "pl") return CriteriaVariant::PL;
  if (name == "ALL" || name == "all" || name == "Prop") return CriteriaVariant::ALL;
  throw InvalidArgument("unknown criteria variant '" + std::string(name) +
                            "' (valid: None, OL, PL, ALL)",
                        "train.criteria.variant");
}

void CriteriaConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be a finite value >= 0", "train.criteria.lambda");
  }
}

double criteria_ol(const ProbabilityView& confidences, int observed) {
  if (observed < 0 || observed >= confidences.size()) {
    throw InvalidArgument("observed label " + std::to_string(observed) + " out of range", "observed");
  }
  return confidences(observed);
}

double criteria_ol(const ProbabilityView& confidences, const ProbabilityView& observed_one_hot) {
  return observed_one_hot.dot(confidences);
}

double criteria_pl(const ProbabilityView& confidences, const ProbabilityView& penalty) {
  return penalty.dot(confidences);
}

double criteria_all(const ProbabilityView& confidences, int observed,
                    const ProbabilityView& penalty, double lambda) {
  return criteria_ol(confidences, observed) - lambda * criteria_pl(confidences, penalty);
}

bool PenaltyLabelSet::is_valid(double tol) const {
  const int classes = k();
  if (labels.cols() != classes || static_cast<int>(fallback_mask.size()) != classes) return false;
  for (int c = 0; c < classes; ++c) {
    if (labels(c, c) != 0.0) return false;
    if ((labels.row(c).array() < 0.0).any()) return false;
    if (std::abs(labels.row(c).sum() - 1.0) > tol) return false;
  }
  return true;
}

PenaltyLabelSet uniform_penalty_labels(int k, std::int64_t epoch_of_estimate) {
  if (k < 2) throw InvalidArgument("penalty labels need k >= 2", "k");
  PenaltyLabelSet set;
  set.labels = Eigen::MatrixXd::Constant(k, k, 1.0 / (k - 1));
  set.labels.diagonal().setZero();
  set.epoch_of_estimate = epoch_of_estimate;
  set.fallback_mask.assign(static_cast<std::size_t>(k), true);
  return set;
}

ConfidenceAccumulator::ConfidenceAccumulator(int k)
    : k_(k), sums_(Eigen::MatrixXd::Zero(k, k)), counts_(static_cast<std::size_t>(k), 0) {}

std::size_t ConfidenceAccumulator::total() const {
  std::size_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

void ConfidenceAccumulator::add(const ProbabilityView& confidences, int observed) {
  if (observed < 0 || observed >= k_) throw InvalidArgument("observed label out of range", "labels");
  sums_.row(observed) += confidences.transpose();
  ++counts_[static_cast<std::size_t>(observed)];
}

void ConfidenceAccumulator::reset() {
  sums_.setZero();
  std::fill(counts_.begin(), counts_.end(), 0);
}

void stack_confidences(ConfidenceAccumulator& acc, const Eigen::Ref<const Eigen::MatrixXd>& batch_confidences,
                       const std::vector<int>& observed_labels) {
  if (static_cast<std::size_t>(batch_confidences.cols()) != observed_labels.size()) {
    throw InvalidArgument("confidence/label count mismatch", "labels");
  }
  for (Eigen::Index c = 0; c < batch_confidences.cols(); ++c) {
    acc.add(batch_confidences.col(c), observed_labels[static_cast<std::size_t>(c)]);
  }
}

PenaltyLabelSet estimate_penalty_labels(const ConfidenceAccumulator& acc,
                                        std::int64_t epoch_of_estimate) {
  const int k = acc.k();
  PenaltyLabelSet set = uniform_penalty_labels(k, epoch_of_estimate);
  for (int c = 0; c < k; ++c) {
    const auto count = acc.counts()[static_cast<std::size_t>(c)];
    if (count == 0) continue;
    Eigen::RowVectorXd mean = acc.sums().row(c) / static_cast<double>(count);
    mean(c) = 0.0;
    const double mass = mean.sum();
    if (!(mass > kPenaltyMassTolerance)) continue;
    set.labels.row(c) = mean / mass;
    set.fallback_mask[static_cast<std::size_t>(c)] = false;
  }
  return set;
}

AffineCheck ideal_penalty_residual(const Eigen::Ref<const Eigen::MatrixXd>& batch_confidences,
                                     const std::vector<int>& observed_labels, double lambda, int k) {
  const PenaltyLabelSet ideal = uniform_penalty_labels(k);
  const double shift = lambda / (k - 1);
  const auto n = static_cast<std::size_t>(batch_confidences.cols());
  std::vector<double> ol(n);
  std::vector<double> all(n);
  AffineCheck check;
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = batch_confidences.col(static_cast<Eigen::Index>(i));
    const int label = observed_labels[i];
    ol[i] = criteria_ol(col, label);
    all[i] = criteria_all(col, label, ideal.labels.row(label).transpose(), lambda);
    const double predicted = (1.0 + shift) * ol[i] - shift;
    check.max_residual = std::max(check.max_residual, std::abs(all[i] - predicted));
  }
  check.orderings_identical = descending_order(ol) == descending_order(all);
  return check;
}

}  // namespace noisylab
