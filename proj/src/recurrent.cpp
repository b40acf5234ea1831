#include "adev/recurrent.hpp"

#include <cmath>

#include "adev/errors.hpp"

namespace adev {

namespace {

using CMap = Eigen::Map<const RMatrix>;
using MMap = Eigen::Map<RMatrix>;

RMatrix sigmoid(const RMatrix& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

void fill_uniform(RVector& p, Eigen::Index off, Eigen::Index n, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index k = 0; k < n; ++k) p(off + k) = u(rng);
}

}  // namespace

Lstm::Lstm(int input_dim, std::vector<int> hidden, int output_dim)
    : in_(input_dim), out_(output_dim), hidden_(std::move(hidden)) {
  require_arg(in_ >= 1 && out_ >= 1 && !hidden_.empty(), "LSTM sizes must be positive");
  Eigen::Index off = 0;
  int prev = in_;
  for (int h : hidden_) {
    require_arg(h >= 1, "LSTM hidden size must be positive");
    LayerOffsets l{};
    l.in = prev;
    l.h = h;
    l.w = off;
    off += 4 * h * prev;
    l.u = off;
    off += 4 * h * h;
    l.b = off;
    off += 4 * h;
    layers_.push_back(l);
    prev = h;
  }
  readout_w_ = off;
  off += out_ * prev;
  readout_b_ = off;
  off += out_;
  count_ = off;
  params_ = RVector::Zero(count_);
}

void Lstm::set_params(const RVector& p) {
  require_shape(p.size() == count_, "LSTM parameter count mismatch");
  params_ = p;
}

void Lstm::initialize(Rng& rng) {
  params_.setZero();
  for (const auto& l : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.h));
    fill_uniform(params_, l.w, 4 * l.h * l.in, bound, rng);
    fill_uniform(params_, l.u, 4 * l.h * l.h, bound, rng);
    params_.segment(l.b + l.h, l.h).setOnes();
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_.back()));
  fill_uniform(params_, readout_w_, out_ * hidden_.back(), bound, rng);
}

std::vector<RMatrix> Lstm::forward(const std::vector<RMatrix>& xs, LstmTape* tape) const {
  require_arg(!xs.empty(), "LSTM input sequence is empty");
  const auto batch = xs.front().cols();
  const auto steps = xs.size();
  if (tape) tape->layers.assign(layers_.size(), {});
  std::vector<RMatrix> current = xs;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& l = layers_[li];
    const CMap w(params_.data() + l.w, 4 * l.h, l.in);
    const CMap u(params_.data() + l.u, 4 * l.h, l.h);
    const Eigen::Map<const RVector> b(params_.data() + l.b, 4 * l.h);
    RMatrix h = RMatrix::Zero(l.h, batch);
    RMatrix c = RMatrix::Zero(l.h, batch);
    std::vector<RMatrix> next(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      require_shape(current[t].rows() == l.in && current[t].cols() == batch,
                    "LSTM input has wrong shape");
      RMatrix a = w * current[t] + u * h;
      a.colwise() += b;
      RMatrix gates(4 * l.h, batch);
      gates.topRows(2 * l.h) = sigmoid(a.topRows(2 * l.h));
      gates.middleRows(2 * l.h, l.h) = a.middleRows(2 * l.h, l.h).array().tanh().matrix();
      gates.bottomRows(l.h) = sigmoid(a.bottomRows(l.h));
      c = (gates.middleRows(l.h, l.h).array() * c.array() +
           gates.topRows(l.h).array() * gates.middleRows(2 * l.h, l.h).array())
              .matrix();
      h = (gates.bottomRows(l.h).array() * c.array().tanh()).matrix();
      if (tape) {
        auto& lt = tape->layers[li];
        lt.input.push_back(current[t]);
        lt.gates.push_back(std::move(gates));
        lt.cell.push_back(c);
        lt.hidden.push_back(h);
      }
      next[t] = h;
    }
    current = std::move(next);
  }
  const CMap wo(params_.data() + readout_w_, out_, hidden_.back());
  const Eigen::Map<const RVector> bo(params_.data() + readout_b_, out_);
  std::vector<RMatrix> ys(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    ys[t] = wo * current[t];
    ys[t].colwise() += bo;
  }
  return ys;
}

std::vector<RMatrix> Lstm::backward(const LstmTape& tape, const std::vector<RMatrix>& dys,
                                    RVector& grad) const {
  require_shape(grad.size() == count_, "LSTM gradient buffer has wrong size");
  require_shape(tape.layers.size() == layers_.size(), "LSTM tape does not match model");
  const auto steps = tape.layers.front().input.size();
  require_shape(dys.size() == steps, "one output gradient slot per step is required");
  const auto batch = tape.layers.front().input.front().cols();
  const int top = hidden_.back();

  const CMap wo(params_.data() + readout_w_, out_, top);
  MMap gwo(grad.data() + readout_w_, out_, top);
  Eigen::Map<RVector> gbo(grad.data() + readout_b_, out_);
  std::vector<RMatrix> dh_above(steps);
  const auto& top_tape = tape.layers.back();
  for (std::size_t t = 0; t < steps; ++t) {
    if (dys[t].size() == 0) {
      dh_above[t] = RMatrix::Zero(top, batch);
      continue;
    }
    gwo.noalias() += dys[t] * top_tape.hidden[t].transpose();
    gbo += dys[t].rowwise().sum();
    dh_above[t] = wo.transpose() * dys[t];
  }

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& l = layers_[li];
    const auto& lt = tape.layers[li];
    const CMap w(params_.data() + l.w, 4 * l.h, l.in);
    const CMap u(params_.data() + l.u, 4 * l.h, l.h);
    MMap gw(grad.data() + l.w, 4 * l.h, l.in);
    MMap gu(grad.data() + l.u, 4 * l.h, l.h);
    Eigen::Map<RVector> gb(grad.data() + l.b, 4 * l.h);
    RMatrix dh_rec = RMatrix::Zero(l.h, batch);
    RMatrix dc_next = RMatrix::Zero(l.h, batch);
    std::vector<RMatrix> dx(steps);
    for (std::size_t t = steps; t-- > 0;) {
      const RMatrix& gates = lt.gates[t];
      const auto ig = gates.topRows(l.h).array();
      const auto fg = gates.middleRows(l.h, l.h).array();
      const auto gg = gates.middleRows(2 * l.h, l.h).array();
      const auto og = gates.bottomRows(l.h).array();
      const RMatrix tc = lt.cell[t].array().tanh().matrix();
      const RMatrix c_prev = t > 0 ? lt.cell[t - 1] : RMatrix::Zero(l.h, batch);
      const RMatrix h_prev = t > 0 ? lt.hidden[t - 1] : RMatrix::Zero(l.h, batch);

      const RMatrix dh = dh_above[t] + dh_rec;
      const RMatrix dc =
          (dh.array() * og * (1.0 - tc.array().square()) + dc_next.array()).matrix();
      RMatrix da(4 * l.h, batch);
      da.topRows(l.h) = (dc.array() * gg * ig * (1.0 - ig)).matrix();
      da.middleRows(l.h, l.h) = (dc.array() * c_prev.array() * fg * (1.0 - fg)).matrix();
      da.middleRows(2 * l.h, l.h) = (dc.array() * ig * (1.0 - gg.square())).matrix();
      da.bottomRows(l.h) = (dh.array() * tc.array() * og * (1.0 - og)).matrix();
      dc_next = (dc.array() * fg).matrix();

      gw.noalias() += da * lt.input[t].transpose();
      gu.noalias() += da * h_prev.transpose();
      gb += da.rowwise().sum();
      dx[t] = w.transpose() * da;
      dh_rec = u.transpose() * da;
    }
    dh_above = std::move(dx);
  }
  return dh_above;
}

}  // namespace adev
