#include "adev/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adev/errors.hpp"

namespace adev {

namespace {

RMatrix diff_rows(const RMatrix& v) { return v.bottomRows(v.rows() - 1) - v.topRows(v.rows() - 1); }

std::vector<RMatrix> increments_of(const Dataset& data) {
  std::vector<RMatrix> out;
  out.reserve(data.size());
  for (const auto& v : data.all_values()) out.push_back(diff_rows(v));
  return out;
}

std::vector<RMatrix> increments_of(const std::vector<CondDevPath>& paths, bool time_channel) {
  std::vector<RMatrix> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(rank2_increments(p, time_channel));
  return out;
}

struct Forward {
  std::vector<DevelopTape> tapes;
  CMatrix mean;
};

Forward forward_all(const DevMap& map, const std::vector<RMatrix>& incs, Exec exec) {
  require_arg(!incs.empty(), "no samples to develop");
  Forward f;
  f.tapes.resize(incs.size());
  for_each_index(exec, incs.size(), [&](std::size_t i) {
    require_shape(incs[i].cols() == map.d_in(), "sample dimension does not match map");
    f.tapes[i] = develop_tape(map, incs[i]);
  });
  std::vector<CMatrix> u(incs.size());
  for (std::size_t i = 0; i < incs.size(); ++i) u[i] = f.tapes[i].result();
  f.mean = mean_in_order(u);
  return f;
}

// sum_i grad of Re <weight * C, U(x_i)>, reduced in sample order.
void backward_all(const DevMap& map, const std::vector<RMatrix>& incs, const Forward& f,
                  const CMatrix& cot, double weight, RVector& grad, Exec exec) {
  const auto p = static_cast<Eigen::Index>(map.param_count());
  std::vector<RVector> per(incs.size());
  const CMatrix c = weight * cot;
  for_each_index(exec, incs.size(), [&](std::size_t i) {
    per[i] = RVector::Zero(p);
    const auto g = develop_backward(f.tapes[i], c);
    accumulate_generator_grads(incs[i], g, 1.0, {per[i].data(), static_cast<std::size_t>(p)});
  });
  for (const auto& v : per) grad += v;
}

// ||Phi_x - Phi_y||^2 * scale and its gradient (added to grad).
double distance_with_grad(const DevMap& map, const std::vector<RMatrix>& ix,
                          const std::vector<RMatrix>& iy, double scale, RVector& grad, Exec exec) {
  const Forward fx = forward_all(map, ix, exec);
  const Forward fy = forward_all(map, iy, exec);
  const CMatrix diff = fx.mean - fy.mean;
  const CMatrix cot = 2.0 * scale * diff;
  backward_all(map, ix, fx, cot, 1.0 / static_cast<double>(ix.size()), grad, exec);
  backward_all(map, iy, fy, cot, -1.0 / static_cast<double>(iy.size()), grad, exec);
  return scale * diff.squaredNorm();
}

}  // namespace

RVector develop_param_grad(const DevMap& map, const std::vector<RMatrix>& increments,
                           const CMatrix& cotangent, double weight, Exec exec) {
  RVector grad = RVector::Zero(static_cast<Eigen::Index>(map.param_count()));
  const Forward f = forward_all(map, increments, exec);
  backward_all(map, increments, f, cotangent, weight, grad, exec);
  return grad;
}

EnsembleGrad grad_epcfd_squared(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y,
                                Exec exec) {
  require_arg(!ensemble.empty(), "ensemble must be nonempty");
  require_shape(x.dim() == y.dim(), "datasets must share a dimension");
  const auto ix = increments_of(x);
  const auto iy = increments_of(y);
  const double scale = 1.0 / static_cast<double>(ensemble.size());
  EnsembleGrad out;
  for (const auto& map : ensemble) {
    RVector g = RVector::Zero(static_cast<Eigen::Index>(map.param_count()));
    out.value += distance_with_grad(map, ix, iy, scale, g, exec);
    out.grads.push_back(std::move(g));
  }
  return out;
}

EnsembleGrad grad_ehrpcfd_squared(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                                  const CondPathsPerMap& cond_y, Exec exec) {
  require_arg(!m2_ens.empty(), "rank-2 ensemble must be nonempty");
  require_shape(!cond_x.empty() && cond_x.size() == cond_y.size(),
                "conditional paths must be given for each rank-1 map on both sides");
  const double scale = 1.0 / static_cast<double>(m2_ens.size() * cond_x.size());
  EnsembleGrad out;
  for (const auto& m2 : m2_ens)
    out.grads.push_back(RVector::Zero(static_cast<Eigen::Index>(m2.map.param_count())));
  for (std::size_t i = 0; i < cond_x.size(); ++i) {
    for (bool time : {true, false}) {
      std::vector<std::size_t> members;
      for (std::size_t j = 0; j < m2_ens.size(); ++j)
        if (m2_ens[j].time_channel == time) members.push_back(j);
      if (members.empty()) continue;
      const auto ix = increments_of(cond_x[i], time);
      const auto iy = increments_of(cond_y[i], time);
      for (auto j : members) out.value += distance_with_grad(m2_ens[j].map, ix, iy, scale, out.grads[j], exec);
    }
  }
  return out;
}

double max_relative_error(const RVector& a, const RVector& b, double floor) {
  require_shape(a.size() == b.size(), "gradient lengths differ");
  const double denom = std::max({a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>(), floor});
  return (a - b).lpNorm<Eigen::Infinity>() / denom;
}

GradReport check_epcfd_gradient(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y) {
  const auto eg = grad_epcfd_squared(ensemble, x, y, Exec::serial);
  GradReport r;
  Eigen::Index total = 0;
  for (const auto& g : eg.grads) total += g.size();
  r.analytic.resize(total);
  r.numeric.resize(total);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const auto& map = ensemble[k];
    auto f = [&](const RVector& p) {
      MapEnsemble e = ensemble;
      e[k] = DevMap::from_params(map.d_in(), map.lie_dim(), p);
      return epcfd_squared(e, x, y, Exec::serial);
    };
    const RVector num = finite_difference(f, map.params());
    r.analytic.segment(off, num.size()) = eg.grads[k];
    r.numeric.segment(off, num.size()) = num;
    off += num.size();
  }
  r.max_rel_error = max_relative_error(r.analytic, r.numeric);
  return r;
}

GradReport check_ehrpcfd_gradient(const MapEnsemble2& m2_ens, const CondPathsPerMap& cond_x,
                                  const CondPathsPerMap& cond_y) {
  const auto eg = grad_ehrpcfd_squared(m2_ens, cond_x, cond_y, Exec::serial);
  GradReport r;
  Eigen::Index total = 0;
  for (const auto& g : eg.grads) total += g.size();
  r.analytic.resize(total);
  r.numeric.resize(total);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < m2_ens.size(); ++k) {
    const auto& m2 = m2_ens[k];
    auto f = [&](const RVector& p) {
      MapEnsemble2 e = m2_ens;
      e[k].map = DevMap::from_params(m2.map.d_in(), m2.lie_dim(), p);
      return ehrpcfd_squared(e, cond_x, cond_y, Exec::serial);
    };
    const RVector num = finite_difference(f, m2.map.params());
    r.analytic.segment(off, num.size()) = eg.grads[k];
    r.numeric.segment(off, num.size()) = num;
    off += num.size();
  }
  r.max_rel_error = max_relative_error(r.analytic, r.numeric);
  return r;
}

// ---------------------------------------------------------------------------

Ascent::Ascent(OptimizerConfig config, Eigen::Index size, bool backtracking)
    : opt_(config, size), backtracking_(backtracking) {}

namespace {

std::vector<std::size_t> draw_batch(std::size_t n, std::size_t b, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (b >= n) return idx;
  for (std::size_t k = 0; k < b; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(b);
  return idx;
}

template <class T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

void check_finite(double v, const char* stage, int it) {
  if (!std::isfinite(v))
    throw TrainingError(std::string(stage) + " objective is not finite at iteration " + std::to_string(it));
}

}  // namespace

Discriminator train_discriminator(const Dataset& x_in, const Dataset& y_in,
                                  const DiscriminatorConfig& config) {
  require_arg(config.n >= 1 && config.m >= 1 && config.k1 >= 1 && config.k2 >= 1,
              "discriminator sizes must be positive");
  require_arg(config.iter1 >= 0 && config.iter2 >= 0 && config.batch_size >= 1,
              "invalid discriminator schedule");
  require_shape(x_in.dim() == y_in.dim() && x_in.length() == y_in.length(),
                "X and Y must share dimension and length");
  const Dataset x = config.time_augment ? time_augment(x_in) : x_in;
  const Dataset y = config.time_augment ? time_augment(y_in) : y_in;
  const int d = static_cast<int>(x.dim());

  Discriminator disc;
  disc.time_augment = config.time_augment;
  disc.m = sample_map_ensemble(d, config.n, config.k1, config.init_std, derive_seed(config.seed, 1));
  disc.m2 = sample_map_ensemble2(config.n, config.m, config.k2, config.rank2_time, config.init_std,
                                 derive_seed(config.seed, 2));
  Rng rng = make_rng(config.seed, 3);
  const auto b = static_cast<std::size_t>(config.batch_size);

  // Stage 1
  std::vector<Ascent> asc1;
  for (const auto& m : disc.m) asc1.emplace_back(config.opt1, static_cast<Eigen::Index>(m.param_count()), config.backtracking);
  for (int it = 0; it < config.iter1; ++it) {
    const Dataset bx = x.subset(draw_batch(x.size(), b, rng));
    const Dataset by = y.subset(draw_batch(y.size(), b, rng));
    const auto eg = grad_epcfd_squared(disc.m, bx, by);
    check_finite(eg.value, "stage-1", it);
    disc.stage1_curve.push_back(eg.value);
    for (std::size_t k = 0; k < disc.m.size(); ++k) {
      RVector p = disc.m[k].params();
      const int d_in = disc.m[k].d_in();
      const int n = disc.m[k].lie_dim();
      auto objective = [&](const RVector& q) {
        return epcfd_squared({DevMap::from_params(d_in, n, q)}, bx, by);
      };
      const double current = config.backtracking ? objective(p) : 0.0;
      asc1[k].step(p, eg.grads[k], current, objective);
      disc.m[k] = DevMap::from_params(d_in, n, p);
    }
  }

  // Stage 2
  for (std::size_t i = 0; i < disc.m.size(); ++i) {
    RegressionConfig rc = config.regression;
    rc.seed = derive_seed(config.seed, 100 + 2 * i);
    disc.reg_x_curves.emplace_back();
    disc.reg_x.push_back(train_regression(x, disc.m[i], rc, &disc.reg_x_curves.back()));
    rc.seed = derive_seed(config.seed, 101 + 2 * i);
    disc.reg_y_curves.emplace_back();
    disc.reg_y.push_back(train_regression(y, disc.m[i], rc, &disc.reg_y_curves.back()));
  }

  // Stage 3
  CondPathsPerMap cx, cy;
  for (std::size_t i = 0; i < disc.m.size(); ++i) {
    cx.push_back(predict_cond_dev(disc.reg_x[i], x, disc.m[i]));
    cy.push_back(predict_cond_dev(disc.reg_y[i], y, disc.m[i]));
  }
  std::vector<Ascent> asc2;
  for (const auto& m2 : disc.m2)
    asc2.emplace_back(config.opt2, static_cast<Eigen::Index>(m2.map.param_count()), config.backtracking);
  for (int it = 0; it < config.iter2; ++it) {
    const auto ix = draw_batch(x.size(), b, rng);
    const auto iy = draw_batch(y.size(), b, rng);
    CondPathsPerMap bx, by;
    for (std::size_t i = 0; i < cx.size(); ++i) {
      bx.push_back(take(cx[i], ix));
      by.push_back(take(cy[i], iy));
    }
    const auto eg = grad_ehrpcfd_squared(disc.m2, bx, by);
    check_finite(eg.value, "stage-3", it);
    disc.stage3_curve.push_back(eg.value);
    for (std::size_t j = 0; j < disc.m2.size(); ++j) {
      RVector p = disc.m2[j].map.params();
      const auto& ref = disc.m2[j];
      auto objective = [&](const RVector& q) {
        MapEnsemble2 one{make_dev_map2(ref.n, ref.time_channel, DevMap::from_params(ref.map.d_in(), ref.lie_dim(), q))};
        return ehrpcfd_squared(one, bx, by);
      };
      const double current = config.backtracking ? objective(p) : 0.0;
      asc2[j].step(p, eg.grads[j], current, objective);
      disc.m2[j].map = DevMap::from_params(ref.map.d_in(), ref.lie_dim(), p);
    }
  }
  return disc;
}

}  // namespace adev
