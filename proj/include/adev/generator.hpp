#pragma once

#include <cstdint>
#include <vector>

#include "adev/data_eval.hpp"
#include "adev/errors.hpp"
#include "adev/optim.hpp"
#include "adev/recurrent.hpp"
#include "adev/train.hpp"

namespace adev {

struct GeneratorShape {
  int d = 1;
  int past = 5;    // p: the past is x_0..x_p
  int steps = 10;  // T: paths have T + 1 points
  int noise_dim = 3;
  int latent_dim = 16;
  std::vector<int> embed_hidden{32};
  std::vector<int> head_hidden{32};
};

/// Rollout record used by GeneratorModel::backward.
struct RolloutTape {
  std::vector<LstmTape> embed;
  std::vector<LstmTape> head;
  std::size_t batch = 0;
};

/// Conditional autoregressive generator: an embedding LSTM reads the window
/// o_{t-p..t} and its last read-out is the latent h; a one-step LSTM head maps
/// [h, z_t] to o_{t+1}.
class GeneratorModel {
 public:
  GeneratorModel() = default;
  explicit GeneratorModel(GeneratorShape shape);

  const GeneratorShape& shape() const { return shape_; }
  int future_len() const { return shape_.steps - shape_.past; }
  Eigen::Index param_count() const { return embed_.param_count() + head_.param_count(); }
  RVector params() const;
  void set_params(const RVector& p);
  void initialize(Rng& rng);

  const Lstm& embed() const { return embed_; }
  const Lstm& head() const { return head_; }

  /// window: (p+1) x d, z: noise_dim.
  RVector generate_step(const RMatrix& window, const RVector& z) const;

  /// past: (p+1) x d, noise: (T-p) x noise_dim. Returns the (T-p) x d future.
  RMatrix rollout(const RMatrix& past, const RMatrix& noise) const;

  /// Batched rollout returning joint (T+1) x d paths whose first p+1 rows are
  /// copied from the pasts.
  std::vector<RMatrix> rollout_batch(const std::vector<RMatrix>& pasts,
                                     const std::vector<RMatrix>& noise,
                                     RolloutTape* tape = nullptr) const;

  /// Parameter gradient given dL/d(joint path); rows 0..p are ignored.
  RVector backward(const RolloutTape& tape, const std::vector<RMatrix>& d_joint) const;

 private:
  GeneratorShape shape_;
  Lstm embed_;
  Lstm head_;
};

/// Standard normal noise, (T-p) x noise_dim per sample.
std::vector<RMatrix> draw_noise(const GeneratorModel& model, std::size_t count, Rng& rng);

/// First p+1 rows of each sample.
std::vector<RMatrix> pasts_of(const Dataset& data, int past);

/// Joint paths generated from the pasts of `data` with one noise draw each.
Dataset generate_like(const GeneratorModel& model, const Dataset& data, std::uint64_t seed);

/// Monte Carlo conditional means of generated futures against the observed
/// futures of `data`.
CondExpInput cond_exp_input(const GeneratorModel& model, const Dataset& data, int draws,
                            std::uint64_t seed);

/// EPCFD^2(x, y) with map gradients and the gradient with respect to the
/// values of every y path.
struct EpcfdGrads {
  double value = 0.0;
  std::vector<RVector> map_grads;
  std::vector<RMatrix> y_grads;
};
EpcfdGrads epcfd_squared_with_path_grads(const MapEnsemble& ensemble, const Dataset& x,
                                         const Dataset& y);

/// Fake-side state of the high-rank loss: conditional paths are built as
/// U_M(y_[0,t]) F(y)_t with F the fake regression.
struct EhrpcfdGrads {
  double value = 0.0;
  std::vector<RVector> m2_grads;
  std::vector<RMatrix> y_grads;
};
EhrpcfdGrads ehrpcfd_squared_with_path_grads(const MapEnsemble& m, const MapEnsemble2& m2,
                                             const CondPathsPerMap& cond_x,
                                             const std::vector<RegressionModel>& reg_y,
                                             const Dataset& y);

struct GanConfig {
  GeneratorShape shape;
  int k1 = 5;
  int n = 5;
  int k2 = 10;
  int m = 13;
  int phase_a_iterations = 2000;
  int phase_c_iterations = 1000;
  int batch_size = 64;
  OptimizerConfig gen_opt{OptimizerKind::adam, 1e-4};
  OptimizerConfig disc_opt{OptimizerKind::adam, 2e-3};
  double clip_norm = 10.0;
  double lr_decay = 0.97;
  int decay_every = 500;
  int iter_r = 500;
  int finetune_iterations = 100;
  double init_std = kDefaultInitStd;
  bool rank2_time = true;
  RegressionConfig regression;
  std::uint64_t seed = 0;
};

struct GanReport {
  std::vector<double> phase_a_loss;
  std::vector<double> phase_c_loss;
  std::vector<RegressionCurve> real_regression;
  // RLoss of each fake regression on fresh samples before and after every
  // fine-tune.
  std::vector<std::pair<double, double>> finetune_rloss;
};

struct GanResult {
  GeneratorModel phase_a;  // generator at the end of phase A
  GeneratorModel model;    // final generator
  MapEnsemble m;
  MapEnsemble2 m2;
  std::vector<RegressionModel> reg_real;
  std::vector<RegressionModel> reg_fake;
  GanReport report;
};

/// Raised on a non-finite loss; carries the last generator with finite loss.
class GanTrainingError : public TrainingError {
 public:
  GanTrainingError(const std::string& what, GeneratorModel last_good)
      : TrainingError(what), last_good_(std::move(last_good)) {}
  const GeneratorModel& last_good() const { return last_good_; }

 private:
  GeneratorModel last_good_;
};

/// Phase A: min-max on EPCFD^2. Phase B: real regressions per rank-1 map,
/// copied as the fake regressions. Phase C: min-max on EHRPCFD^2 with the
/// fake regressions fine-tuned every iter_r generator steps.
GanResult train_hrpcf_gan(const Dataset& data, const GanConfig& config);

}  // namespace adev
