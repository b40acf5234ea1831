#pragma once

#include <vector>

#include "adev/rng.hpp"
#include "adev/unitary.hpp"

namespace adev {

// Sequences are stored time-major: xs[t] is (features x batch), one column per
// sample. All parameters of a network live in one flat vector so optimizers
// and checkpoints treat every model the same way.

struct LstmLayerTape {
  std::vector<RMatrix> input;   // x_t
  std::vector<RMatrix> gates;   // [i; f; g; o] after activation, (4h x B)
  std::vector<RMatrix> cell;    // c_t
  std::vector<RMatrix> hidden;  // h_t
};

struct LstmTape {
  std::vector<LstmLayerTape> layers;
};

/// Stacked LSTM with a linear read-out applied at every step. Gate order is
/// (input, forget, cell, output); the forget bias starts at 1.
class Lstm {
 public:
  Lstm() = default;
  Lstm(int input_dim, std::vector<int> hidden, int output_dim);

  int input_dim() const { return in_; }
  int output_dim() const { return out_; }
  const std::vector<int>& hidden() const { return hidden_; }
  Eigen::Index param_count() const { return count_; }

  RVector& params() { return params_; }
  const RVector& params() const { return params_; }
  void set_params(const RVector& p);

  /// Uniform(-1/sqrt(h), 1/sqrt(h)) weights, zero biases, forget bias 1.
  void initialize(Rng& rng);

  std::vector<RMatrix> forward(const std::vector<RMatrix>& xs, LstmTape* tape = nullptr) const;

  /// Accumulates parameter gradients into `grad` and returns the input
  /// gradients. dys[t] may be empty when step t carries no loss.
  std::vector<RMatrix> backward(const LstmTape& tape, const std::vector<RMatrix>& dys,
                                RVector& grad) const;

 private:
  struct LayerOffsets {
    Eigen::Index w, u, b;
    int in, h;
  };

  int in_ = 0;
  int out_ = 0;
  std::vector<int> hidden_;
  std::vector<LayerOffsets> layers_;
  Eigen::Index readout_w_ = 0;
  Eigen::Index readout_b_ = 0;
  Eigen::Index count_ = 0;
  RVector params_;
};

}  // namespace adev
