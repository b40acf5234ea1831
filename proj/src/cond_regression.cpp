#include "adev/cond_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adev/errors.hpp"

namespace adev {

void FiniteProcessSpec::validate() const {
  require_arg(!paths.empty() && paths.size() == probs.size(),
              "finite process needs one probability per support path");
  double total = 0.0;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    require_shape(paths[k].rows() == times.size() && paths[k].cols() == paths.front().cols(),
                  "finite process paths must share grid and dimension");
    require_arg(probs[k] >= 0.0, "probabilities must be nonnegative");
    total += probs[k];
  }
  require_arg(std::abs(total - 1.0) < 1e-12, "probabilities must sum to 1");
}

FiniteProcessSpec time_augment(const FiniteProcessSpec& spec) {
  spec.validate();
  FiniteProcessSpec out = spec;
  for (auto& p : out.paths) p = time_augment(PiecewisePath(spec.times, p)).values();
  return out;
}

std::vector<CMatrix> future_developments(const DevMap& map, const RMatrix& values) {
  const auto l = values.rows();
  const int n = map.lie_dim();
  std::vector<CMatrix> out(static_cast<std::size_t>(l));
  out.back() = CMatrix::Identity(n, n);
  RVector dx(values.cols());
  for (Eigen::Index t = l - 1; t-- > 0;) {
    dx = (values.row(t + 1) - values.row(t)).transpose();
    const CMatrix e = spectral_expm(map.apply({dx.data(), static_cast<std::size_t>(dx.size())})).value;
    out[static_cast<std::size_t>(t)] = e * out[static_cast<std::size_t>(t + 1)];
  }
  return out;
}

std::vector<CMatrix> past_developments(const DevMap& map, const RMatrix& values) {
  const auto l = values.rows();
  const int n = map.lie_dim();
  std::vector<CMatrix> out(static_cast<std::size_t>(l));
  out.front() = CMatrix::Identity(n, n);
  RVector dx(values.cols());
  for (Eigen::Index t = 1; t < l; ++t) {
    dx = (values.row(t) - values.row(t - 1)).transpose();
    const CMatrix e = spectral_expm(map.apply({dx.data(), static_cast<std::size_t>(dx.size())})).value;
    out[static_cast<std::size_t>(t)] = out[static_cast<std::size_t>(t - 1)] * e;
  }
  return out;
}

std::vector<CondDevPath> oracle_cond_dev(const FiniteProcessSpec& spec, const DevMap& map) {
  spec.validate();
  require_shape(spec.paths.front().cols() == map.d_in(), "process dimension does not match map");
  const auto k_paths = spec.paths.size();
  const auto l = spec.times.size();
  std::vector<std::vector<CMatrix>> past(k_paths), future(k_paths);
  for (std::size_t k = 0; k < k_paths; ++k) {
    past[k] = past_developments(map, spec.paths[k]);
    future[k] = future_developments(map, spec.paths[k]);
  }
  const int n = map.lie_dim();
  std::vector<CondDevPath> out(k_paths);
  for (std::size_t k = 0; k < k_paths; ++k) {
    out[k].steps.resize(static_cast<std::size_t>(l));
    for (Eigen::Index t = 0; t < l; ++t) {
      CMatrix acc = CMatrix::Zero(n, n);
      double mass = 0.0;
      for (std::size_t j = 0; j < k_paths; ++j) {
        if (spec.paths[j].topRows(t + 1) != spec.paths[k].topRows(t + 1)) continue;
        acc += spec.probs[j] * future[j][static_cast<std::size_t>(t)];
        mass += spec.probs[j];
      }
      if (!(mass > 0.0))
        throw ArgumentError("conditioning on a zero-probability atom (path " + std::to_string(k) +
                            ", t = " + std::to_string(t) + ")");
      out[k].steps[static_cast<std::size_t>(t)] = past[k][static_cast<std::size_t>(t)] * (acc / mass);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

RegressionModel::RegressionModel(int n, int d, int steps, std::vector<int> hidden)
    : n_(n), d_(d), steps_(steps), net_(d, std::move(hidden), 2 * n * n) {
  require_arg(n >= 1 && d >= 1 && steps >= 2, "regression model sizes must be positive");
}

std::vector<RMatrix> RegressionModel::forward(const std::vector<const RMatrix*>& batch,
                                              LstmTape* tape) const {
  require_arg(!batch.empty(), "empty regression batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  std::vector<RMatrix> xs(static_cast<std::size_t>(steps_), RMatrix(d_, b));
  for (Eigen::Index i = 0; i < b; ++i) {
    const RMatrix& v = *batch[static_cast<std::size_t>(i)];
    require_shape(v.rows() == steps_ && v.cols() == d_, "regression input has wrong shape");
    for (int t = 0; t < steps_; ++t) xs[static_cast<std::size_t>(t)].col(i) = v.row(t).transpose();
  }
  return net_.forward(xs, tape);
}

CMatrix column_to_matrix(const RMatrix& y, Eigen::Index col, int n) {
  CMatrix m(n, n);
  Eigen::Index r = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k, r += 2) m(j, k) = Complex(y(r, col), y(r + 1, col));
  return m;
}

void matrix_to_column(const CMatrix& m, RMatrix& y, Eigen::Index col) {
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index k = 0; k < m.cols(); ++k, r += 2) {
      y(r, col) = m(j, k).real();
      y(r + 1, col) = m(j, k).imag();
    }
}

std::vector<std::vector<CMatrix>> RegressionModel::predict(const Dataset& data) const {
  std::vector<const RMatrix*> batch;
  for (const auto& v : data.all_values()) batch.push_back(&v);
  const auto ys = forward(batch);
  std::vector<std::vector<CMatrix>> out(data.size(), std::vector<CMatrix>(ys.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t t = 0; t < ys.size(); ++t)
      out[i][t] = column_to_matrix(ys[t], static_cast<Eigen::Index>(i), n_);
  return out;
}

namespace {

// Targets laid out like the network output: (2n^2 x 1) per step.
std::vector<RMatrix> target_columns(const DevMap& map, const RMatrix& values) {
  const auto fut = future_developments(map, values);
  const int n = map.lie_dim();
  std::vector<RMatrix> out(fut.size(), RMatrix(2 * n * n, 1));
  for (std::size_t t = 0; t < fut.size(); ++t) matrix_to_column(fut[t], out[t], 0);
  return out;
}

double batch_loss(const RegressionModel& model, const std::vector<const RMatrix*>& inputs,
                  const std::vector<const std::vector<RMatrix>*>& targets, LstmTape* tape,
                  std::vector<RMatrix>* dys) {
  const auto ys = model.forward(inputs, tape);
  const auto b = static_cast<double>(inputs.size());
  const double norm = 1.0 / (b * static_cast<double>(ys.size()));
  double loss = 0.0;
  if (dys) dys->assign(ys.size(), RMatrix());
  for (std::size_t t = 0; t < ys.size(); ++t) {
    RMatrix diff = ys[t];
    for (std::size_t i = 0; i < inputs.size(); ++i)
      diff.col(static_cast<Eigen::Index>(i)) -= (*targets[i])[t].col(0);
    loss += diff.squaredNorm();
    if (dys) (*dys)[t] = 2.0 * norm * diff;
  }
  return loss * norm;
}

}  // namespace

double rloss(const RegressionModel& model, const Dataset& batch, const DevMap& map) {
  require_shape(model.n() == map.lie_dim(), "regression output size does not match map");
  std::vector<std::vector<RMatrix>> targets(batch.size());
  std::vector<const RMatrix*> inputs;
  std::vector<const std::vector<RMatrix>*> tptr;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    targets[i] = target_columns(map, batch.values(i));
    inputs.push_back(&batch.values(i));
    tptr.push_back(&targets[i]);
  }
  return batch_loss(model, inputs, tptr, nullptr, nullptr);
}

void fit_regression(RegressionModel& model, const Dataset& data, const DevMap& map,
                    const RegressionConfig& config, RegressionCurve* curve) {
  require_arg(!data.empty(), "regression training data is empty");
  require_arg(config.iterations >= 0 && config.batch_size >= 1, "invalid regression schedule");
  require_arg(config.val_fraction >= 0.0 && config.val_fraction < 1.0,
              "validation fraction must be in [0, 1)");
  require_shape(model.n() == map.lie_dim() && model.d() == data.dim() &&
                    model.steps() == data.length(),
                "regression model does not match data and map");
  const std::size_t n_total = data.size();
  std::vector<std::vector<RMatrix>> targets(n_total);
  for_each_index(Exec::parallel, n_total,
                 [&](std::size_t i) { targets[i] = target_columns(map, data.values(i)); });

  Rng rng = make_rng(config.seed, 0x5e9);
  std::vector<std::size_t> order(n_total);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(std::ceil(config.val_fraction * static_cast<double>(n_total)));
  if (n_total < 10) n_val = 0;
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<long>(n_val), order.end());
  if (val.empty()) val = train;

  std::vector<const RMatrix*> val_in;
  std::vector<const std::vector<RMatrix>*> val_t;
  for (auto i : val) {
    val_in.push_back(&data.values(i));
    val_t.push_back(&targets[i]);
  }

  Optimizer opt(config.opt, model.net().param_count());
  RVector params = model.net().params();
  RVector best = params;
  double best_val = batch_loss(model, val_in, val_t, nullptr, nullptr);
  int best_iter = 0;
  if (curve) {
    curve->val_loss.push_back(best_val);
    curve->best_iteration = 0;
    curve->best_val_loss = best_val;
  }
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), train.size());
  int stale = 0;
  for (int it = 1; it <= config.iterations; ++it) {
    for (std::size_t k = 0; k < b; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, train.size() - 1);
      std::swap(train[k], train[pick(rng)]);
    }
    std::vector<const RMatrix*> in;
    std::vector<const std::vector<RMatrix>*> tg;
    for (std::size_t k = 0; k < b; ++k) {
      in.push_back(&data.values(train[k]));
      tg.push_back(&targets[train[k]]);
    }
    LstmTape tape;
    std::vector<RMatrix> dys;
    const double loss = batch_loss(model, in, tg, &tape, &dys);
    if (!std::isfinite(loss)) throw TrainingError("regression loss diverged at iteration " + std::to_string(it));
    RVector grad = RVector::Zero(params.size());
    model.net().backward(tape, dys, grad);
    opt.step(params, grad);
    model.net().set_params(params);

    const double vloss = batch_loss(model, val_in, val_t, nullptr, nullptr);
    if (!std::isfinite(vloss)) throw TrainingError("regression validation loss is not finite");
    if (curve) {
      curve->train_loss.push_back(loss);
      curve->val_loss.push_back(vloss);
    }
    if (vloss < best_val) {
      best_val = vloss;
      best = params;
      best_iter = it;
      stale = 0;
    } else if (++stale > config.patience) {
      break;
    }
  }
  model.net().set_params(best);
  if (curve) {
    curve->best_iteration = best_iter;
    curve->best_val_loss = best_val;
  }
}

RegressionModel train_regression(const Dataset& data, const DevMap& map,
                                 const RegressionConfig& config, RegressionCurve* curve) {
  require_arg(!data.empty(), "regression training data is empty");
  RegressionModel model(map.lie_dim(), static_cast<int>(data.dim()), static_cast<int>(data.length()),
                        config.hidden);
  Rng rng = make_rng(config.seed, 0x1a17);
  model.net().initialize(rng);
  fit_regression(model, data, map, config, curve);
  return model;
}

std::vector<CondDevPath> assemble_cond_dev(const DevMap& map, const Dataset& data,
                                           const std::vector<std::vector<CMatrix>>& predictions,
                                           Exec exec) {
  require_shape(predictions.size() == data.size(), "one prediction sequence per sample is required");
  const int n = map.lie_dim();
  std::vector<CondDevPath> out(data.size());
  for_each_index(exec, data.size(), [&](std::size_t i) {
    const auto past = past_developments(map, data.values(i));
    require_shape(predictions[i].size() == past.size(), "prediction length does not match path");
    auto& steps = out[i].steps;
    steps.resize(past.size());
    for (std::size_t t = 0; t + 1 < past.size(); ++t) steps[t] = past[t] * predictions[i][t];
    steps.back() = past.back() * CMatrix::Identity(n, n);
  });
  return out;
}

std::vector<CondDevPath> predict_cond_dev(const RegressionModel& model, const Dataset& data,
                                          const DevMap& map, Exec exec) {
  require_shape(model.n() == map.lie_dim() && model.d() == data.dim() &&
                    model.steps() == data.length(),
                "regression model does not match data and map");
  return assemble_cond_dev(map, data, model.predict(data), exec);
}

}  // namespace adev
