#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace noisylab {

// CE clamps the observed-class probability to this floor before the log.
inline constexpr double kProbabilityFloor = 1e-12;

// L_SL = alpha * CE + beta * RCE. RCE evaluates log(0) as log_zero_clamp.
struct SlConfig {
  double alpha = 1.0;
  double beta = 0.0;
  double log_zero_clamp = -4.0;

  void validate() const;
};

// Per-dataset SL presets used by the reference setup: alpha = 1 everywhere,
// beta = 0.08 (cifar10, clothing1m), 0.3 (cifar100, tiny-imagenet),
// 0.01 (animal10n). Throws InvalidArgument for unknown names.
SlConfig sl_preset(std::string_view dataset);

enum class LossKind { CE, SL };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

struct LossSpec {
  LossKind kind = LossKind::CE;
  SlConfig sl;
};

using ProbabilityView = Eigen::Ref<const Eigen::VectorXd>;

double ce_loss(const ProbabilityView& confidences, int observed);
double ce_loss(const ProbabilityView& confidences, const ProbabilityView& target);

double rce_loss(const ProbabilityView& confidences, int observed, double log_zero_clamp);
double rce_loss(const ProbabilityView& confidences, const ProbabilityView& target,
                double log_zero_clamp);

double sl_loss(const ProbabilityView& confidences, int observed, const SlConfig& cfg);
double sl_loss(const ProbabilityView& confidences, const ProbabilityView& target,
               const SlConfig& cfg);

double loss_value(const ProbabilityView& confidences, const ProbabilityView& target,
                  const LossSpec& spec);

// d loss / d logits for a softmax output `confidences`. The CE part uses the
// exact softmax derivative p * sum(target) - target, which doesn't see the
// probability floor (the floor only guards the log in the loss value).
Eigen::VectorXd loss_logit_gradient(const ProbabilityView& confidences,
                                    const ProbabilityView& target, const LossSpec& spec);

}  // namespace noisylab
