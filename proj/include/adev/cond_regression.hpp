#pragma once

#include <cstdint>
#include <vector>

#include "adev/hrpcf.hpp"
#include "adev/optim.hpp"
#include "adev/path.hpp"
#include "adev/recurrent.hpp"

namespace adev {

/// Finite-support process: support paths on one grid with probabilities.
struct FiniteProcessSpec {
  RVector times;
  std::vector<RMatrix> paths;
  std::vector<double> probs;

  void validate() const;
};

FiniteProcessSpec time_augment(const FiniteProcessSpec& spec);

/// Exact E[U_M(X) | F_t] along each support path, by enumerating the atoms
/// of the natural filtration.
std::vector<CondDevPath> oracle_cond_dev(const FiniteProcessSpec& spec, const DevMap& map);

/// U_M(x_[t,T]) for t = 0..T (the last entry is the identity).
std::vector<CMatrix> future_developments(const DevMap& map, const RMatrix& values);
/// U_M(x_[0,t]) for t = 0..T (the first entry is the identity).
std::vector<CMatrix> past_developments(const DevMap& map, const RMatrix& values);

/// Causal LSTM read-out of 2n^2 reals per step, reshaped to C^{n x n}.
class RegressionModel {
 public:
  RegressionModel() = default;
  RegressionModel(int n, int d, int steps, std::vector<int> hidden);

  int n() const { return n_; }
  int d() const { return d_; }
  int steps() const { return steps_; }  // T + 1 sample points
  Lstm& net() { return net_; }
  const Lstm& net() const { return net_; }

  /// Rows of the i-th path become the inputs; outputs are (2n^2 x B) per step.
  std::vector<RMatrix> forward(const std::vector<const RMatrix*>& batch,
                               LstmTape* tape = nullptr) const;

  /// Per-sample, per-step matrices F(x)_t.
  std::vector<std::vector<CMatrix>> predict(const Dataset& data) const;

 private:
  int n_ = 0;
  int d_ = 0;
  int steps_ = 0;
  Lstm net_;
};

/// Interleaved (Re, Im) row-major column <-> matrix.
CMatrix column_to_matrix(const RMatrix& y, Eigen::Index col, int n);
void matrix_to_column(const CMatrix& m, RMatrix& y, Eigen::Index col);

/// (1 / (B (T+1))) sum_x sum_t ||F(x)_t - U_M(x_[t,T])||^2
double rloss(const RegressionModel& model, const Dataset& batch, const DevMap& map);

struct RegressionConfig {
  std::vector<int> hidden{32, 32};
  OptimizerConfig opt{OptimizerKind::adam, 1e-3};
  int iterations = 1000;
  int batch_size = 256;
  double val_fraction = 0.1;
  int patience = 50;
  std::uint64_t seed = 0;
};

struct RegressionCurve {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_iteration = -1;
  double best_val_loss = 0.0;
};

/// Minibatch training on RLoss; keeps the parameters with the best
/// validation loss and stops after `patience` stale iterations.
RegressionModel train_regression(const Dataset& data, const DevMap& map,
                                 const RegressionConfig& config, RegressionCurve* curve = nullptr);

/// Continues training an existing model (used for fine-tuning).
void fit_regression(RegressionModel& model, const Dataset& data, const DevMap& map,
                    const RegressionConfig& config, RegressionCurve* curve = nullptr);

/// p_t = U_M(x_[0,t]) F(x)_t for per-sample predictions F(x)_t, with F_T
/// replaced by the identity.
std::vector<CondDevPath> assemble_cond_dev(const DevMap& map, const Dataset& data,
                                           const std::vector<std::vector<CMatrix>>& predictions,
                                           Exec exec = Exec::parallel);

/// assemble_cond_dev with the model's predictions.
std::vector<CondDevPath> predict_cond_dev(const RegressionModel& model, const Dataset& data,
                                          const DevMap& map, Exec exec = Exec::parallel);

}  // namespace adev
