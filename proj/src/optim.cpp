#include "adev/optim.hpp"

#include <cmath>

#include "adev/errors.hpp"

namespace adev {

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "momentum") return OptimizerKind::momentum;
  if (name == "adam") return OptimizerKind::adam;
  throw ArgumentError("unknown optimizer '" + name + "' (expected sgd, momentum or adam)");
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adam: return "adam";
  }
  return "adam";
}

Optimizer::Optimizer(OptimizerConfig config, Eigen::Index size)
    : config_(config), m_(RVector::Zero(size)), v_(RVector::Zero(size)) {
  require_arg(config_.lr > 0.0 && std::isfinite(config_.lr), "learning rate must be positive");
}

void Optimizer::step(RVector& params, const RVector& grad) {
  require_shape(params.size() == m_.size() && grad.size() == m_.size(),
                "optimizer state does not match parameter size");
  if (!grad.allFinite()) throw TrainingError("non-finite gradient");
  RVector g = grad;
  if (config_.clip_norm > 0.0) clip_gradient(g, config_.clip_norm);
  ++t_;
  switch (config_.kind) {
    case OptimizerKind::sgd:
      params -= config_.lr * g;
      break;
    case OptimizerKind::momentum:
      m_ = config_.momentum * m_ + g;
      params -= config_.lr * m_;
      break;
    case OptimizerKind::adam: {
      m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * g;
      v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
      params.array() -= config_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.eps);
      break;
    }
  }
}

double clip_gradient(RVector& g, double max_norm) {
  const double norm = g.norm();
  if (norm > max_norm && norm > 0.0) g *= max_norm / norm;
  return norm;
}

double decayed_lr(double lr, double rate, long long every, long long step) {
  if (every <= 0) return lr;
  return lr * std::pow(rate, static_cast<double>(step / every));
}

}  // namespace adev
