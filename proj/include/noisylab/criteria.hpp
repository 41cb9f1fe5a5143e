#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace noisylab {

using ProbabilityView = Eigen::Ref<const Eigen::VectorXd>;

// None trains on every sample. OL, PL and ALL score samples and keep the top
// R% of each mini-batch. PL ranks by -Criteria_PL (least like a dominant
// noisy sample first); OL and ALL rank by their raw score.
enum class CriteriaVariant { None, OL, PL, ALL };

std::string_view to_string(CriteriaVariant variant);
CriteriaVariant parse_criteria_variant(std::string_view name);

struct CriteriaConfig {
  CriteriaVariant variant = CriteriaVariant::ALL;
  double lambda = 1.0;

  void validate() const;
  bool uses_penalty() const {
    return variant == CriteriaVariant::PL || variant == CriteriaVariant::ALL;
  }
};

// Confidence at the observed class.
double criteria_ol(const ProbabilityView& confidences, int observed);
double criteria_ol(const ProbabilityView& confidences, const ProbabilityView& observed_one_hot);

// Inner product of confidences with a penalty label.
double criteria_pl(const ProbabilityView& confidences, const ProbabilityView& penalty);

// OL - lambda * PL. Never clipped; may be negative.
double criteria_all(const ProbabilityView& confidences, int observed,
                    const ProbabilityView& penalty, double lambda);

// Class-wise penalty labels m^k stored as rows: row k = m^k.
struct PenaltyLabelSet {
  Eigen::MatrixXd labels;
  // Epoch whose confidences produced this estimate; -1 for the initial set.
  std::int64_t epoch_of_estimate = -1;
  std::vector<bool> fallback_mask;

  int k() const { return static_cast<int>(labels.rows()); }
  Eigen::VectorXd row(int k) const { return labels.row(k).transpose(); }

  // m^k(k) == 0, entries >= 0, rows sum to 1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

// Ideal symmetric penalty labels: 1/(K-1) off-class, 0 on-class. Every row
// is flagged as fallback.
PenaltyLabelSet uniform_penalty_labels(int k, std::int64_t epoch_of_estimate = -1);

// Running per-observed-class sums of confidence vectors.
class ConfidenceAccumulator {
 public:
  explicit ConfidenceAccumulator(int k);

  int k() const { return k_; }
  const Eigen::MatrixXd& sums() const { return sums_; }  // row k: sum over C^k
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t total() const;

  void add(const ProbabilityView& confidences, int observed);
  void reset();

 private:
  int k_;
  Eigen::MatrixXd sums_;
  std::vector<std::size_t> counts_;
};

// Adds each column of `batch_confidences` (K x B) to the row of its observed
// label, in column order.
void stack_confidences(ConfidenceAccumulator& acc, const Eigen::Ref<const Eigen::MatrixXd>& batch_confidences,
                       const std::vector<int>& observed_labels);

inline constexpr double kPenaltyMassTolerance = 1e-12;

// Averages the stacked confidences per class, zeroes the own-class entry and
// rescales the rest to sum to one. Empty classes, or classes whose
// off-class mass is <= kPenaltyMassTolerance, fall back to the uniform row.
PenaltyLabelSet estimate_penalty_labels(const ConfidenceAccumulator& acc,
                                        std::int64_t epoch_of_estimate = -1);

struct AffineCheck {
  double max_residual = 0.0;
  bool orderings_identical = true;
};

// With ideal symmetric penalty labels, ALL = (1 + c) * OL - c with
// c = lambda / (K - 1). Reports max |ALL - ((1 + c) OL - c)| over the batch
// and whether the descending orders (index tie-break) of ALL and OL agree.
AffineCheck ideal_penalty_residual(const Eigen::Ref<const Eigen::MatrixXd>& batch_confidences,
                                     const std::vector<int>& observed_labels, double lambda, int k);

}  // namespace noisylab
