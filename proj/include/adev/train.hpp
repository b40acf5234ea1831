#pragma once

#include <cstdint>
#include <vector>

#include "adev/cond_regression.hpp"
#include "adev/hrpcf.hpp"
#include "adev/optim.hpp"
#include "adev/path.hpp"

namespace adev {

/// Sum over samples of the parameter gradient of Re <C_i, U_M(x_i)>, with
/// C_i = weight * cotangent for every sample. Reduced in sample order.
RVector develop_param_grad(const DevMap& map, const std::vector<RMatrix>& increments,
                           const CMatrix& cotangent, double weight, Exec exec = Exec::parallel);

/// EPCFD^2 and its gradient with respect to each map's parameters.
struct EnsembleGrad {
  double value = 0.0;
  std::vector<RVector> grads;
};

EnsembleGrad grad_epcfd_squared(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y,
                                Exec exec = Exec::parallel);

/// EHRPCFD^2 and its gradient with respect to each rank-2 map's parameters;
/// the conditional paths are constants.
EnsembleGrad grad_ehrpcfd_squared(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                                  const CondPathsPerMap& cond_y, Exec exec = Exec::parallel);

/// Analytic versus central finite-difference gradient.
struct GradReport {
  RVector analytic;
  RVector numeric;
  double max_rel_error = 0.0;
};

/// Central differences of f over all coordinates of x.
template <class F>
RVector finite_difference(F&& f, const RVector& x, double h = 1e-5) {
  RVector g(x.size());
  RVector y = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    y(k) = x(k) + h;
    const double up = f(y);
    y(k) = x(k) - h;
    const double down = f(y);
    y(k) = x(k);
    g(k) = (up - down) / (2.0 * h);
  }
  return g;
}

/// max_k |a_k - b_k| / max(|a|_inf, |b|_inf, floor)
double max_relative_error(const RVector& a, const RVector& b, double floor = 1e-8);

GradReport check_epcfd_gradient(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y);
GradReport check_ehrpcfd_gradient(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                                  const CondPathsPerMap& cond_y);

struct DiscriminatorConfig {
  int n = 3;
  int m = 13;
  int k1 = 1;
  int k2 = 10;
  int iter1 = 300;
  int iter2 = 300;
  int batch_size = 256;
  OptimizerConfig opt1{OptimizerKind::adam, 0.02};
  OptimizerConfig opt2{OptimizerKind::adam, 0.02};
  bool backtracking = false;
  double init_std = kDefaultInitStd;
  bool time_augment = true;
  bool rank2_time = true;
  RegressionConfig regression;
  std::uint64_t seed = 0;
};

struct Discriminator {
  bool time_augment = true;
  MapEnsemble m;
  std::vector<RegressionModel> reg_x;
  std::vector<RegressionModel> reg_y;
  MapEnsemble2 m2;

  std::vector<double> stage1_curve;
  std::vector<RegressionCurve> reg_x_curves;
  std::vector<RegressionCurve> reg_y_curves;
  std::vector<double> stage3_curve;
};

/// Stage 1: ascent on EPCFD^2 over the rank-1 ensemble. Stage 2: one
/// regression per trained map on each of X and Y. Stage 3: ascent on
/// EHRPCFD^2 over the rank-2 ensemble with everything else frozen.
Discriminator train_discriminator(const Dataset& x, const Dataset& y,
                                  const DiscriminatorConfig& config);

/// Gradient ascent on one flat parameter vector. With backtracking the step
/// params + lr * g is halved until the objective does not decrease.
class Ascent {
 public:
  Ascent(OptimizerConfig config, Eigen::Index size, bool backtracking);

  template <class Objective>
  void step(RVector& params, const RVector& grad, double current, Objective&& objective) {
    if (!backtracking_) {
      RVector neg = -grad;
      opt_.step(params, neg);
      return;
    }
    double lr = opt_.lr();
    for (int k = 0; k < 40; ++k, lr *= 0.5) {
      RVector trial = params + lr * grad;
      if (objective(trial) >= current) {
        params = trial;
        return;
      }
    }
  }

  Optimizer& optimizer() { return opt_; }

 private:
  Optimizer opt_;
  bool backtracking_;
};

}  // namespace adev
