#include "adev/path.hpp"

#include <cmath>
#include <string>

#include "adev/errors.hpp"

namespace adev {

namespace {

void check_values(const RVector& times, const RMatrix& values) {
  require_shape(times.size() >= 2, "a path needs at least 2 samples");
  require_shape(values.rows() == times.size(), "path values must have one row per time stamp");
  require_shape(values.cols() >= 1, "path dimension must be >= 1");
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times(i))) throw NumericError("path has a non-finite time stamp");
    if (i > 0 && !(times(i) > times(i - 1)))
      throw ArgumentError("path times must be strictly increasing (index " + std::to_string(i) + ")");
  }
  if (!values.allFinite()) throw NumericError("path has non-finite values");
}

RMatrix diff_rows(const RMatrix& v) {
  const auto l = v.rows();
  return v.bottomRows(l - 1) - v.topRows(l - 1);
}

}  // namespace

PiecewisePath::PiecewisePath(RVector times, RMatrix values)
    : times_(std::move(times)), values_(std::move(values)) {
  check_values(times_, values_);
}

RMatrix PiecewisePath::increments() const { return diff_rows(values_); }

PiecewisePath PiecewisePath::slice(Eigen::Index first, Eigen::Index last) const {
  require_arg(first >= 0 && last < length() && first < last, "invalid path slice");
  return PiecewisePath(times_.segment(first, last - first + 1),
                       values_.middleRows(first, last - first + 1));
}

Dataset::Dataset(RVector times, std::vector<RMatrix> values)
    : times_(std::move(times)), values_(std::move(values)) {
  require_arg(!values_.empty(), "dataset must contain at least one sample");
  const auto d = values_.front().cols();
  for (const auto& v : values_) {
    require_shape(v.cols() == d, "dataset samples must share one dimension");
    check_values(times_, v);
  }
}

Dataset::Dataset(const std::vector<PiecewisePath>& paths) {
  require_arg(!paths.empty(), "dataset must contain at least one sample");
  times_ = paths.front().times();
  values_.reserve(paths.size());
  for (const auto& p : paths) {
    require_shape(p.times() == times_, "dataset samples must share one time grid");
    require_shape(p.dim() == paths.front().dim(), "dataset samples must share one dimension");
    values_.push_back(p.values());
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<RMatrix> v;
  v.reserve(indices.size());
  for (auto i : indices) {
    require_arg(i < values_.size(), "subset index out of range");
    v.push_back(values_[i]);
  }
  return Dataset(times_, std::move(v));
}

Dataset Dataset::concat(const Dataset& other) const {
  require_shape(times_ == other.times_ && dim() == other.dim(),
                "concatenated datasets must share grid and dimension");
  std::vector<RMatrix> v = values_;
  v.insert(v.end(), other.values_.begin(), other.values_.end());
  return Dataset(times_, std::move(v));
}

namespace {

RVector normalized_time(const RVector& t) {
  const double span = t(t.size() - 1) - t(0);
  return (t.array() - t(0)) / span;
}

RMatrix prepend_channel(const RVector& channel, const RMatrix& values) {
  RMatrix out(values.rows(), values.cols() + 1);
  out.col(0) = channel;
  out.rightCols(values.cols()) = values;
  return out;
}

}  // namespace

PiecewisePath time_augment(const PiecewisePath& path) {
  return PiecewisePath(path.times(), prepend_channel(normalized_time(path.times()), path.values()));
}

Dataset time_augment(const Dataset& data) {
  const RVector channel = normalized_time(data.times());
  std::vector<RMatrix> v;
  v.reserve(data.size());
  for (const auto& x : data.all_values()) v.push_back(prepend_channel(channel, x));
  return Dataset(data.times(), std::move(v));
}

RVector unit_time_grid(Eigen::Index points) {
  require_arg(points >= 2, "time grid needs at least 2 points");
  return RVector::LinSpaced(points, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

CMatrix develop_increments(const DevMap& map, const RMatrix& increments) {
  require_shape(increments.cols() == map.d_in(),
                "development: path dimension " + std::to_string(increments.cols()) +
                    " does not match map input dimension " + std::to_string(map.d_in()));
  const int n = map.lie_dim();
  CMatrix u = CMatrix::Identity(n, n);
  RVector row(increments.cols());
  for (Eigen::Index i = 0; i < increments.rows(); ++i) {
    row = increments.row(i).transpose();
    const CMatrix e = spectral_expm(map.apply({row.data(), static_cast<std::size_t>(row.size())})).value;
    u = u * e;
  }
  if (!is_unitary(u)) throw InternalError("development lost unitarity");
  return u;
}

CMatrix develop(const DevMap& map, const PiecewisePath& path) {
  return develop_increments(map, path.increments());
}

DevelopTape develop_tape(const DevMap& map, const RMatrix& increments) {
  require_shape(increments.cols() == map.d_in(), "development: input dimension mismatch");
  const int n = map.lie_dim();
  DevelopTape tape;
  tape.steps.reserve(static_cast<std::size_t>(increments.rows()));
  tape.prefix.reserve(static_cast<std::size_t>(increments.rows() + 1));
  tape.prefix.push_back(CMatrix::Identity(n, n));
  RVector row(increments.cols());
  for (Eigen::Index i = 0; i < increments.rows(); ++i) {
    row = increments.row(i).transpose();
    tape.steps.push_back(spectral_expm(map.apply({row.data(), static_cast<std::size_t>(row.size())})));
    tape.prefix.push_back(tape.prefix.back() * tape.steps.back().value);
  }
  return tape;
}

std::vector<CMatrix> develop_backward(const DevelopTape& tape,
                                      const std::vector<CMatrix>& prefix_cotangents) {
  require_shape(prefix_cotangents.size() == tape.prefix.size(),
                "one cotangent slot per prefix is required");
  const auto steps = tape.steps.size();
  const auto n = tape.prefix.front().rows();
  std::vector<CMatrix> grads(steps);
  CMatrix c = CMatrix::Zero(n, n);
  if (prefix_cotangents[steps].size() > 0) c = prefix_cotangents[steps];
  for (std::size_t t = steps; t-- > 0;) {
    // P_{t+1} = P_t E_t
    const CMatrix& e = tape.steps[t].value;
    const CMatrix grad_e = tape.prefix[t].adjoint() * c;
    grads[t] = expm_differential_adjoint(tape.steps[t], grad_e);
    c = c * e.adjoint();
    if (prefix_cotangents[t].size() > 0) c += prefix_cotangents[t];
  }
  return grads;
}

std::vector<CMatrix> develop_backward(const DevelopTape& tape, const CMatrix& result_cotangent) {
  std::vector<CMatrix> cot(tape.prefix.size());
  cot.back() = result_cotangent;
  return develop_backward(tape, cot);
}

void accumulate_generator_grads(const RMatrix& increments,
                                const std::vector<CMatrix>& algebra_grads, double weight,
                                std::span<double> param_grads) {
  require_shape(static_cast<std::size_t>(increments.rows()) == algebra_grads.size(),
                "one algebra gradient per increment is required");
  if (algebra_grads.empty()) return;
  const auto n = algebra_grads.front().rows();
  const auto per = static_cast<std::size_t>(n * n);
  require_shape(param_grads.size() == per * static_cast<std::size_t>(increments.cols()),
                "generator gradient buffer has wrong size");
  std::vector<double> tmp(per);
  for (Eigen::Index c = 0; c < increments.cols(); ++c) {
    CMatrix g = CMatrix::Zero(n, n);
    for (Eigen::Index t = 0; t < increments.rows(); ++t) {
      const double v = increments(t, c);
      if (v != 0.0) g += v * algebra_grads[static_cast<std::size_t>(t)];
    }
    AntiHermitian::gradient_to_params(g, tmp);
    auto out = param_grads.subspan(static_cast<std::size_t>(c) * per, per);
    for (std::size_t k = 0; k < per; ++k) out[k] += weight * tmp[k];
  }
}

RMatrix increment_grads(const DevMap& map, const std::vector<CMatrix>& algebra_grads) {
  RMatrix out(static_cast<Eigen::Index>(algebra_grads.size()), map.d_in());
  for (std::size_t t = 0; t < algebra_grads.size(); ++t)
    for (int c = 0; c < map.d_in(); ++c)
      out(static_cast<Eigen::Index>(t), c) = hs_inner(algebra_grads[t], map.generator(c).matrix()).real();
  return out;
}

std::vector<CMatrix> develop_all(const DevMap& map, const Dataset& data, Exec exec) {
  require_arg(!data.empty(), "dataset must be nonempty");
  require_shape(data.dim() == map.d_in(), "dataset dimension does not match map input dimension");
  std::vector<CMatrix> out(data.size());
  for_each_index(exec, data.size(), [&](std::size_t i) {
    out[i] = develop_increments(map, diff_rows(data.values(i)));
  });
  return out;
}

CMatrix mean_in_order(const std::vector<CMatrix>& mats) {
  require_arg(!mats.empty(), "cannot average an empty list");
  CMatrix s = mats.front();
  for (std::size_t i = 1; i < mats.size(); ++i) s += mats[i];
  return s / static_cast<double>(mats.size());
}

CMatrix pcf(const DevMap& map, const Dataset& data, Exec exec) {
  return mean_in_order(develop_all(map, data, exec));
}

double epcfd_squared(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y, Exec exec) {
  require_arg(!ensemble.empty(), "ensemble must be nonempty");
  double s = 0.0;
  for (const auto& m : ensemble) s += hs_distance_squared(pcf(m, x, exec), pcf(m, y, exec));
  return s / static_cast<double>(ensemble.size());
}

double epcfd(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y, Exec exec) {
  return std::sqrt(epcfd_squared(ensemble, x, y, exec));
}

DevMap direct_sum(const DevMap& a, const DevMap& b) {
  require_shape(a.d_in() == b.d_in(), "direct sum needs equal input dimensions");
  const int na = a.lie_dim();
  const int nb = b.lie_dim();
  std::vector<AntiHermitian> gens;
  for (int c = 0; c < a.d_in(); ++c) {
    CMatrix g = CMatrix::Zero(na + nb, na + nb);
    g.topLeftCorner(na, na) = a.generator(c).matrix();
    g.bottomRightCorner(nb, nb) = b.generator(c).matrix();
    gens.push_back(AntiHermitian::project(g));
  }
  return DevMap(std::move(gens));
}

}  // namespace adev
