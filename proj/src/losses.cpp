#include "noisylab/losses.hpp"

#include "noisylab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace noisylab {

namespace {

double clamped_log(double y, double clamp) {
  if (y <= 0.0) return clamp;
  return std::max(std::log(y), clamp);
}

}  // namespace

void SlConfig::validate() const {
  if (!(alpha >= 0.0)) throw InvalidArgument("SL alpha must be >= 0", "train.sl.alpha");
  if (!(beta >= 0.0)) throw InvalidArgument("SL beta must be >= 0", "train.sl.beta");
  if (!(log_zero_clamp < 0.0)) {
    throw InvalidArgument("SL log_zero_clamp must be negative", "train.sl.log_zero_clamp");
  }
}

SlConfig sl_preset(std::string_view dataset) {
  SlConfig cfg;
  if (dataset == "cifar10" || dataset == "clothing1m") {
    cfg.beta = 0.08;
  } else if (dataset == "cifar100" || dataset == "tiny-imagenet") {
    cfg.beta = 0.3;
  } else if (dataset == "animal10n") {
    cfg.beta = 0.01;
  } else {
    throw InvalidArgument("unknown SL preset '" + std::string(dataset) + "'", "train.sl.preset");
  }
  return cfg;
}

std::string_view to_string(LossKind kind) { return kind == LossKind::CE ? "CE" : "SL"; }

LossKind parse_loss_kind(std::string_view name) {
  if (name == "CE" || name == "ce") return LossKind::CE;
  if (name == "SL" || name == "sl") return LossKind::SL;
  throw InvalidArgument("unknown loss '" + std::string(name) + "' (expected CE or SL)",
                        "train.loss");
}

double ce_loss(const ProbabilityView& confidences, int observed) {
  return -std::log(std::max(confidences(observed), kProbabilityFloor));
}

double ce_loss(const ProbabilityView& confidences, const ProbabilityView& target) {
  double loss = 0.0;
  for (Eigen::Index j = 0; j < confidences.size(); ++j) {
    if (target(j) != 0.0) loss -= target(j) * std::log(std::max(confidences(j), kProbabilityFloor));
  }
  return loss;
}

double rce_loss(const ProbabilityView& confidences, int observed, double log_zero_clamp) {
  return -log_zero_clamp * (1.0 - confidences(observed));
}

double rce_loss(const ProbabilityView& confidences, const ProbabilityView& target,
                double log_zero_clamp) {
  double loss = 0.0;
  for (Eigen::Index j = 0; j < confidences.size(); ++j) {
    loss -= confidences(j) * clamped_log(target(j), log_zero_clamp);
  }
  return loss;
}

double sl_loss(const ProbabilityView& confidences, int observed, const SlConfig& cfg) {
  const double ce = ce_loss(confidences, observed);
  if (cfg.beta == 0.0) return cfg.alpha * ce;
  return cfg.alpha * ce + cfg.beta * rce_loss(confidences, observed, cfg.log_zero_clamp);
}

double sl_loss(const ProbabilityView& confidences, const ProbabilityView& target,
               const SlConfig& cfg) {
  const double ce = ce_loss(confidences, target);
  if (cfg.beta == 0.0) return cfg.alpha * ce;
  return cfg.alpha * ce + cfg.beta * rce_loss(confidences, target, cfg.log_zero_clamp);
}

double loss_value(const ProbabilityView& confidences, const ProbabilityView& target,
                  const LossSpec& spec) {
  if (spec.kind == LossKind::CE) return ce_loss(confidences, target);
  return sl_loss(confidences, target, spec.sl);
}

Eigen::VectorXd loss_logit_gradient(const ProbabilityView& confidences,
                                    const ProbabilityView& target, const LossSpec& spec) {
  Eigen::VectorXd ce_grad = confidences * target.sum() - target;
  if (spec.kind == LossKind::CE) return ce_grad;

  const SlConfig& cfg = spec.sl;
  if (cfg.beta == 0.0) return cfg.alpha * ce_grad;

  // RCE = sum_j c_j p_j with c_j = -log(target_j); dRCE/dz_m = p_m (c_m - sum_j c_j p_j).
  Eigen::VectorXd cost(confidences.size());
  for (Eigen::Index j = 0; j < confidences.size(); ++j) {
    cost(j) = -clamped_log(target(j), cfg.log_zero_clamp);
  }
  const double expected_cost = cost.dot(confidences);
  const Eigen::VectorXd rce_grad =
      confidences.cwiseProduct((cost.array() - expected_cost).matrix());
  return cfg.alpha * ce_grad + cfg.beta * rce_grad;
}

}  // namespace noisylab
