#pragma once

#include <string>

#include "adev/unitary.hpp"

namespace adev {

enum class OptimizerKind { sgd, momentum, adam };

OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 1e-3;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 0.0;  // 0 disables clipping
};

/// First-order optimizer over one flat parameter vector. step() descends;
/// ascent callers pass the negated gradient.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, Eigen::Index size);

  void step(RVector& params, const RVector& grad);
  void set_lr(double lr) { config_.lr = lr; }
  double lr() const { return config_.lr; }
  const OptimizerConfig& config() const { return config_; }
  long long steps_taken() const { return t_; }

 private:
  OptimizerConfig config_;
  RVector m_;
  RVector v_;
  long long t_ = 0;
};

/// Rescales g in place so that ||g||_2 <= max_norm; returns the original norm.
double clip_gradient(RVector& g, double max_norm);

/// lr * rate^(floor(step / every))
double decayed_lr(double lr, double rate, long long every, long long step);

}  // namespace adev
