#include "adev/generator.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace adev {

GeneratorModel::GeneratorModel(GeneratorShape shape)
    : shape_(std::move(shape)),
      embed_(shape_.d, shape_.embed_hidden, shape_.latent_dim),
      head_(shape_.latent_dim + shape_.noise_dim, shape_.head_hidden, shape_.d) {
  require_arg(shape_.past >= 0 && shape_.past < shape_.steps, "generator needs 0 <= p < T");
  require_arg(shape_.noise_dim >= 1, "noise dimension must be positive");
}

RVector GeneratorModel::params() const {
  RVector p(param_count());
  p << embed_.params(), head_.params();
  return p;
}

void GeneratorModel::set_params(const RVector& p) {
  require_shape(p.size() == param_count(), "generator parameter count mismatch");
  embed_.set_params(p.head(embed_.param_count()));
  head_.set_params(p.tail(head_.param_count()));
}

void GeneratorModel::initialize(Rng& rng) {
  embed_.initialize(rng);
  head_.initialize(rng);
}

RVector GeneratorModel::generate_step(const RMatrix& window, const RVector& z) const {
  require_shape(window.rows() == shape_.past + 1 && window.cols() == shape_.d,
                "generator window must be (p+1) x d");
  require_shape(z.size() == shape_.noise_dim, "noise vector has the wrong size");
  std::vector<RMatrix> xs;
  for (Eigen::Index r = 0; r < window.rows(); ++r) xs.push_back(window.row(r).transpose());
  const RMatrix h = embed_.forward(xs).back();
  RMatrix in(shape_.latent_dim + shape_.noise_dim, 1);
  in << h, z;
  return head_.forward({in}).front().col(0);
}

RMatrix GeneratorModel::rollout(const RMatrix& past, const RMatrix& noise) const {
  const auto joint = rollout_batch({past}, {noise});
  return joint.front().bottomRows(future_len());
}

std::vector<RMatrix> GeneratorModel::rollout_batch(const std::vector<RMatrix>& pasts,
                                                   const std::vector<RMatrix>& noise,
                                                   RolloutTape* tape) const {
  require_shape(!pasts.empty() && pasts.size() == noise.size(), "one noise sequence per past is required");
  const int p = shape_.past;
  const int d = shape_.d;
  const int k_steps = future_len();
  const auto b = static_cast<Eigen::Index>(pasts.size());
  std::vector<RMatrix> joint(pasts.size(), RMatrix::Zero(shape_.steps + 1, d));
  for (std::size_t i = 0; i < pasts.size(); ++i) {
    require_shape(pasts[i].rows() == p + 1 && pasts[i].cols() == d, "past must be (p+1) x d");
    require_shape(noise[i].rows() == k_steps && noise[i].cols() == shape_.noise_dim,
                  "noise must be (T-p) x noise_dim");
    joint[i].topRows(p + 1) = pasts[i];
  }
  if (tape) {
    tape->embed.assign(static_cast<std::size_t>(k_steps), LstmTape{});
    tape->head.assign(static_cast<std::size_t>(k_steps), LstmTape{});
    tape->batch = pasts.size();
  }
  std::vector<RMatrix> xs(static_cast<std::size_t>(p + 1), RMatrix(d, b));
  RMatrix in(shape_.latent_dim + shape_.noise_dim, b);
  for (int k = 0; k < k_steps; ++k) {
    const int t = p + k;
    for (int j = 0; j <= p; ++j)
      for (Eigen::Index i = 0; i < b; ++i)
        xs[static_cast<std::size_t>(j)].col(i) = joint[static_cast<std::size_t>(i)].row(t - p + j).transpose();
    const auto ys = embed_.forward(xs, tape ? &tape->embed[static_cast<std::size_t>(k)] : nullptr);
    in.topRows(shape_.latent_dim) = ys.back();
    for (Eigen::Index i = 0; i < b; ++i)
      in.col(i).tail(shape_.noise_dim) = noise[static_cast<std::size_t>(i)].row(k).transpose();
    const RMatrix o = head_.forward({in}, tape ? &tape->head[static_cast<std::size_t>(k)] : nullptr).front();
    for (Eigen::Index i = 0; i < b; ++i) joint[static_cast<std::size_t>(i)].row(t + 1) = o.col(i).transpose();
  }
  return joint;
}

RVector GeneratorModel::backward(const RolloutTape& tape, const std::vector<RMatrix>& d_joint) const {
  require_shape(d_joint.size() == tape.batch, "one path gradient per sample is required");
  const int p = shape_.past;
  const int d = shape_.d;
  const int k_steps = future_len();
  const auto b = static_cast<Eigen::Index>(tape.batch);
  std::vector<RMatrix> dj = d_joint;
  RVector g_embed = RVector::Zero(embed_.param_count());
  RVector g_head = RVector::Zero(head_.param_count());
  for (int k = k_steps - 1; k >= 0; --k) {
    const int t = p + k;
    RMatrix dout(d, b);
    for (Eigen::Index i = 0; i < b; ++i) dout.col(i) = dj[static_cast<std::size_t>(i)].row(t + 1).transpose();
    const auto din = head_.backward(tape.head[static_cast<std::size_t>(k)], {dout}, g_head);
    std::vector<RMatrix> dys(static_cast<std::size_t>(p + 1));
    dys.back() = din.front().topRows(shape_.latent_dim);
    const auto dx = embed_.backward(tape.embed[static_cast<std::size_t>(k)], dys, g_embed);
    for (int j = 0; j <= p; ++j)
      for (Eigen::Index i = 0; i < b; ++i)
        dj[static_cast<std::size_t>(i)].row(t - p + j) += dx[static_cast<std::size_t>(j)].col(i).transpose();
  }
  RVector g(param_count());
  g << g_embed, g_head;
  return g;
}

std::vector<RMatrix> draw_noise(const GeneratorModel& model, std::size_t count, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RMatrix> out(count, RMatrix(model.future_len(), model.shape().noise_dim));
  for (auto& z : out)
    for (Eigen::Index r = 0; r < z.rows(); ++r)
      for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = normal(rng);
  return out;
}

std::vector<RMatrix> pasts_of(const Dataset& data, int past) {
  require_arg(past + 1 <= data.length(), "past is longer than the paths");
  std::vector<RMatrix> out;
  out.reserve(data.size());
  for (const auto& v : data.all_values()) out.push_back(v.topRows(past + 1));
  return out;
}

namespace {

void check_data(const GeneratorModel& model, const Dataset& data) {
  require_shape(!data.empty() && data.length() == model.shape().steps + 1 && data.dim() == model.shape().d,
                "data does not match the generator shape");
}

}  // namespace

Dataset generate_like(const GeneratorModel& model, const Dataset& data, std::uint64_t seed) {
  check_data(model, data);
  Rng rng = make_rng(seed, 0);
  return Dataset(data.times(),
                 model.rollout_batch(pasts_of(data, model.shape().past), draw_noise(model, data.size(), rng)));
}

CondExpInput cond_exp_input(const GeneratorModel& model, const Dataset& data, int draws,
                            std::uint64_t seed) {
  check_data(model, data);
  require_arg(draws >= 1, "at least one Monte Carlo draw is required");
  const int k = model.future_len();
  const auto pasts = pasts_of(data, model.shape().past);
  CondExpInput out;
  for (const auto& v : data.all_values()) {
    out.real_future.push_back(v.bottomRows(k));
    out.fake_mean_future.push_back(RMatrix::Zero(k, v.cols()));
  }
  for (int r = 0; r < draws; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    const auto joint = model.rollout_batch(pasts, draw_noise(model, data.size(), rng));
    for (std::size_t i = 0; i < joint.size(); ++i) out.fake_mean_future[i] += joint[i].bottomRows(k);
  }
  for (auto& f : out.fake_mean_future) f /= static_cast<double>(draws);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

RMatrix diff_rows(const RMatrix& v) { return v.bottomRows(v.rows() - 1) - v.topRows(v.rows() - 1); }

// Gradient of a path from gradients of its increments.
void add_increment_grads(const RMatrix& inc_grads, RMatrix& path_grads) {
  const auto steps = inc_grads.rows();
  path_grads.topRows(steps) -= inc_grads;
  path_grads.bottomRows(steps) += inc_grads;
}

struct SideTapes {
  std::vector<RMatrix> inc;
  std::vector<DevelopTape> tapes;
  CMatrix mean;
};

SideTapes develop_side(const DevMap& map, std::vector<RMatrix> inc) {
  SideTapes s;
  s.inc = std::move(inc);
  s.tapes.resize(s.inc.size());
  for_each_index(Exec::parallel, s.inc.size(), [&](std::size_t i) {
    require_shape(s.inc[i].cols() == map.d_in(), "sample dimension does not match map");
    s.tapes[i] = develop_tape(map, s.inc[i]);
  });
  std::vector<CMatrix> u(s.inc.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = s.tapes[i].result();
  s.mean = mean_in_order(u);
  return s;
}

// Adds the map gradient of sum_i Re <cot, U(x_i)> and returns per-sample
// algebra gradients.
std::vector<std::vector<CMatrix>> backward_side(const DevMap& map, const SideTapes& s, const CMatrix& cot,
                                                RVector& grad) {
  const auto np = static_cast<Eigen::Index>(map.param_count());
  std::vector<std::vector<CMatrix>> alg(s.inc.size());
  std::vector<RVector> per(s.inc.size());
  for_each_index(Exec::parallel, s.inc.size(), [&](std::size_t i) {
    alg[i] = develop_backward(s.tapes[i], cot);
    per[i] = RVector::Zero(np);
    accumulate_generator_grads(s.inc[i], alg[i], 1.0, {per[i].data(), static_cast<std::size_t>(np)});
  });
  for (const auto& v : per) grad += v;
  return alg;
}

}  // namespace

EpcfdGrads epcfd_squared_with_path_grads(const MapEnsemble& ensemble, const Dataset& x, const Dataset& y) {
  require_arg(!ensemble.empty() && !x.empty() && !y.empty(), "empty ensemble or dataset");
  require_shape(x.dim() == y.dim(), "datasets must share a dimension");
  const double scale = 1.0 / static_cast<double>(ensemble.size());
  std::vector<RMatrix> ix, iy;
  for (const auto& v : x.all_values()) ix.push_back(diff_rows(v));
  for (const auto& v : y.all_values()) iy.push_back(diff_rows(v));
  EpcfdGrads out;
  for (const auto& v : y.all_values()) out.y_grads.push_back(RMatrix::Zero(v.rows(), v.cols()));
  for (const auto& map : ensemble) {
    const SideTapes sx = develop_side(map, ix);
    const SideTapes sy = develop_side(map, iy);
    const CMatrix diff = sx.mean - sy.mean;
    out.value += scale * diff.squaredNorm();
    RVector g = RVector::Zero(static_cast<Eigen::Index>(map.param_count()));
    backward_side(map, sx, (2.0 * scale / static_cast<double>(ix.size())) * diff, g);
    const auto alg = backward_side(map, sy, (-2.0 * scale / static_cast<double>(iy.size())) * diff, g);
    for (std::size_t i = 0; i < iy.size(); ++i) add_increment_grads(increment_grads(map, alg[i]), out.y_grads[i]);
    out.map_grads.push_back(std::move(g));
  }
  return out;
}

EhrpcfdGrads ehrpcfd_squared_with_path_grads(const MapEnsemble& m, const MapEnsemble2& m2,
                                             const CondPathsPerMap& cond_x,
                                             const std::vector<RegressionModel>& reg_y, const Dataset& y) {
  require_arg(!m.empty() && !m2.empty() && !y.empty(), "empty ensemble or dataset");
  require_shape(cond_x.size() == m.size() && reg_y.size() == m.size(),
                "one conditional path set and regression per rank-1 map is required");
  const double scale = 1.0 / static_cast<double>(m.size() * m2.size());
  const std::size_t b = y.size();
  const auto len = static_cast<std::size_t>(y.length());
  EhrpcfdGrads out;
  for (const auto& v : y.all_values()) out.y_grads.push_back(RMatrix::Zero(v.rows(), v.cols()));
  for (const auto& mm : m2) out.m2_grads.push_back(RVector::Zero(static_cast<Eigen::Index>(mm.map.param_count())));

  std::vector<const RMatrix*> inputs;
  for (const auto& v : y.all_values()) inputs.push_back(&v);

  for (std::size_t i = 0; i < m.size(); ++i) {
    const DevMap& map = m[i];
    const int n = map.lie_dim();
    std::vector<RMatrix> inc(b);
    std::vector<DevelopTape> past(b);
    for_each_index(Exec::parallel, b, [&](std::size_t s) {
      inc[s] = diff_rows(y.values(s));
      past[s] = develop_tape(map, inc[s]);
    });
    LstmTape ltape;
    const auto f = reg_y[i].forward(inputs, &ltape);
    std::vector<std::vector<CMatrix>> fm(b, std::vector<CMatrix>(len));
    std::vector<CondDevPath> cy(b);
    for (std::size_t s = 0; s < b; ++s) {
      cy[s].steps.resize(len);
      for (std::size_t t = 0; t + 1 < len; ++t) {
        fm[s][t] = column_to_matrix(f[t], static_cast<Eigen::Index>(s), n);
        cy[s].steps[t] = past[s].prefix[t] * fm[s][t];
      }
      cy[s].steps.back() = past[s].prefix.back();
    }

    std::vector<std::vector<CMatrix>> d_cond(b, std::vector<CMatrix>(len, CMatrix::Zero(n, n)));
    for (std::size_t j = 0; j < m2.size(); ++j) {
      const DevMap2& mm = m2[j];
      std::vector<RMatrix> rx, ry;
      for (const auto& p : cond_x[i]) rx.push_back(rank2_increments(p, mm.time_channel));
      for (const auto& p : cy) ry.push_back(rank2_increments(p, mm.time_channel));
      const SideTapes sx = develop_side(mm.map, std::move(rx));
      const SideTapes sy = develop_side(mm.map, std::move(ry));
      const CMatrix diff = sx.mean - sy.mean;
      out.value += scale * diff.squaredNorm();
      backward_side(mm.map, sx, (2.0 * scale / static_cast<double>(sx.inc.size())) * diff, out.m2_grads[j]);
      const auto alg = backward_side(mm.map, sy, (-2.0 * scale / static_cast<double>(b)) * diff, out.m2_grads[j]);
      const int off = mm.time_channel ? 1 : 0;
      for_each_index(Exec::parallel, b, [&](std::size_t s) {
        const RMatrix g = increment_grads(mm.map, alg[s]);
        for (Eigen::Index t = 0; t < g.rows(); ++t) {
          Eigen::Index c = off;
          for (int r = 0; r < n; ++r)
            for (int q = 0; q < n; ++q, c += 2) {
              const Complex v(g(t, c), g(t, c + 1));
              d_cond[s][static_cast<std::size_t>(t)](r, q) -= v;
              d_cond[s][static_cast<std::size_t>(t + 1)](r, q) += v;
            }
        }
      });
    }

    // Back through p_t = U(y_[0,t]) F_t.
    const auto two_n2 = static_cast<Eigen::Index>(2 * n * n);
    std::vector<RMatrix> dys(len, RMatrix::Zero(two_n2, static_cast<Eigen::Index>(b)));
    dys.back() = RMatrix();
    for_each_index(Exec::parallel, b, [&](std::size_t s) {
      std::vector<CMatrix> prefix_cot(len);
      for (std::size_t t = 0; t + 1 < len; ++t) {
        prefix_cot[t] = d_cond[s][t] * fm[s][t].adjoint();
        matrix_to_column(past[s].prefix[t].adjoint() * d_cond[s][t], dys[t], static_cast<Eigen::Index>(s));
      }
      prefix_cot.back() = d_cond[s].back();
      const auto alg = develop_backward(past[s], prefix_cot);
      add_increment_grads(increment_grads(map, alg), out.y_grads[s]);
    });
    RVector unused = RVector::Zero(reg_y[i].net().param_count());
    const auto dx = reg_y[i].net().backward(ltape, dys, unused);
    for (std::size_t s = 0; s < b; ++s)
      for (std::size_t t = 0; t < len; ++t)
        out.y_grads[s].row(static_cast<Eigen::Index>(t)) += dx[t].col(static_cast<Eigen::Index>(s)).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

RVector flatten(const std::vector<RVector>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  RVector out(total);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.segment(off, p.size()) = p;
    off += p.size();
  }
  return out;
}

RVector ensemble_params(const MapEnsemble& e) {
  std::vector<RVector> parts;
  for (const auto& m : e) parts.push_back(m.params());
  return flatten(parts);
}

void set_ensemble_params(MapEnsemble& e, const RVector& p) {
  Eigen::Index off = 0;
  for (auto& m : e) {
    const auto c = static_cast<Eigen::Index>(m.param_count());
    m = DevMap::from_params(m.d_in(), m.lie_dim(), RVector(p.segment(off, c)));
    off += c;
  }
}

RVector ensemble_params(const MapEnsemble2& e) {
  std::vector<RVector> parts;
  for (const auto& m : e) parts.push_back(m.map.params());
  return flatten(parts);
}

void set_ensemble_params(MapEnsemble2& e, const RVector& p) {
  Eigen::Index off = 0;
  for (auto& m : e) {
    const auto c = static_cast<Eigen::Index>(m.map.param_count());
    m.map = DevMap::from_params(m.map.d_in(), m.lie_dim(), RVector(p.segment(off, c)));
    off += c;
  }
}

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

// Drops the leading time channel of each gradient.
std::vector<RMatrix> strip_time(const std::vector<RMatrix>& g) {
  std::vector<RMatrix> out;
  out.reserve(g.size());
  for (const auto& m : g) out.push_back(m.rightCols(m.cols() - 1));
  return out;
}

class Trainer {
 public:
  Trainer(const GanConfig& config, GeneratorModel& gen)
      : config_(config), gen_(gen), gen_opt_(config.gen_opt, gen.param_count()) {}

  void step_generator(const RolloutTape& tape, const std::vector<RMatrix>& y_grads) {
    RVector g = gen_.backward(tape, strip_time(y_grads));
    if (config_.clip_norm > 0.0) clip_gradient(g, config_.clip_norm);
    RVector p = gen_.params();
    gen_opt_.step(p, g);
    gen_.set_params(p);
    ++steps_;
  }

  // lr * decay^(floor(steps / decay_every)) for an optimizer's base rate.
  double lr_for(double base) const { return decayed_lr(base, config_.lr_decay, config_.decay_every, steps_); }
  void decay() { gen_opt_.set_lr(lr_for(config_.gen_opt.lr)); }

  void ascend(Optimizer& opt, RVector& params, RVector grad) {
    if (config_.clip_norm > 0.0) clip_gradient(grad, config_.clip_norm);
    opt.set_lr(lr_for(config_.disc_opt.lr));
    RVector neg = -grad;
    opt.step(params, neg);
  }

 private:
  const GanConfig& config_;
  GeneratorModel& gen_;
  Optimizer gen_opt_;
  long long steps_ = 0;
};

}  // namespace

GanResult train_hrpcf_gan(const Dataset& data, const GanConfig& config) {
  const GeneratorShape& shape = config.shape;
  require_arg(!data.empty(), "training data is empty");
  require_shape(data.length() == shape.steps + 1 && data.dim() == shape.d,
                "data does not match the generator shape");
  require_arg(config.k1 >= 1 && config.k2 >= 1 && config.n >= 1 && config.m >= 1, "discriminator sizes must be positive");
  require_arg(config.phase_a_iterations >= 0 && config.phase_c_iterations >= 0 && config.batch_size >= 1 &&
                  config.iter_r >= 1 && config.decay_every >= 1,
              "invalid GAN schedule");

  GanResult res;
  res.model = GeneratorModel(shape);
  Rng init = make_rng(config.seed, 4);
  res.model.initialize(init);
  GeneratorModel& gen = res.model;

  const Dataset data_aug = time_augment(data);
  res.m = sample_map_ensemble(static_cast<int>(data_aug.dim()), config.n, config.k1, config.init_std,
                              derive_seed(config.seed, 1));
  res.m2 = sample_map_ensemble2(config.n, config.m, config.k2, config.rank2_time, config.init_std,
                                derive_seed(config.seed, 2));
  Rng rng = make_rng(config.seed, 3);
  const auto b = static_cast<std::size_t>(config.batch_size);
  const auto all_pasts = pasts_of(data, shape.past);

  Trainer trainer(config, gen);
  RVector last_good = gen.params();
  auto fail = [&](const std::string& phase, int it) {
    GeneratorModel good = gen;
    good.set_params(last_good);
    throw GanTrainingError(phase + " loss is not finite at iteration " + std::to_string(it), good);
  };
  auto fake_batch = [&](const std::vector<std::size_t>& idx, RolloutTape& tape) {
    std::vector<RMatrix> pasts;
    for (auto i : idx) pasts.push_back(all_pasts[i]);
    return Dataset(data.times(), gen.rollout_batch(pasts, draw_noise(gen, idx.size(), rng), &tape));
  };

  // Phase A
  Optimizer d1(config.disc_opt, ensemble_params(res.m).size());
  for (int it = 0; it < config.phase_a_iterations; ++it) {
    const auto idx = draw_batch(data.size(), b, rng);
    RolloutTape tape;
    const Dataset fake = fake_batch(idx, tape);
    const auto g = epcfd_squared_with_path_grads(res.m, data_aug.subset(idx), time_augment(fake));
    if (!std::isfinite(g.value)) fail("phase-A", it);
    last_good = gen.params();
    res.report.phase_a_loss.push_back(g.value);
    RVector p = ensemble_params(res.m);
    trainer.ascend(d1, p, flatten(g.map_grads));
    set_ensemble_params(res.m, p);
    trainer.step_generator(tape, g.y_grads);
    trainer.decay();
  }
  res.phase_a = gen;

  // Phase B
  CondPathsPerMap cond_real;
  for (std::size_t i = 0; i < res.m.size(); ++i) {
    RegressionConfig rc = config.regression;
    rc.seed = derive_seed(config.seed, 100 + i);
    res.report.real_regression.emplace_back();
    res.reg_real.push_back(train_regression(data_aug, res.m[i], rc, &res.report.real_regression.back()));
    cond_real.push_back(predict_cond_dev(res.reg_real[i], data_aug, res.m[i]));
  }
  res.reg_fake = res.reg_real;

  // Phase C
  Optimizer d2(config.disc_opt, ensemble_params(res.m2).size());
  for (int it = 0; it < config.phase_c_iterations; ++it) {
    const auto idx = draw_batch(data.size(), b, rng);
    RolloutTape tape;
    const Dataset fake = fake_batch(idx, tape);
    CondPathsPerMap cx;
    for (const auto& per : cond_real) {
      std::vector<CondDevPath> sel;
      for (auto i : idx) sel.push_back(per[i]);
      cx.push_back(std::move(sel));
    }
    const auto g = ehrpcfd_squared_with_path_grads(res.m, res.m2, cx, res.reg_fake, time_augment(fake));
    if (!std::isfinite(g.value)) fail("phase-C", it);
    last_good = gen.params();
    res.report.phase_c_loss.push_back(g.value);
    RVector p = ensemble_params(res.m2);
    trainer.ascend(d2, p, flatten(g.m2_grads));
    set_ensemble_params(res.m2, p);
    trainer.step_generator(tape, g.y_grads);
    trainer.decay();

    if ((it + 1) % config.iter_r == 0) {
      const std::uint64_t round = static_cast<std::uint64_t>((it + 1) / config.iter_r);
      const Dataset train_fake = time_augment(generate_like(gen, data, derive_seed(config.seed, 200 + 2 * round)));
      const Dataset fresh = time_augment(generate_like(gen, data, derive_seed(config.seed, 201 + 2 * round)));
      for (std::size_t i = 0; i < res.m.size(); ++i) {
        RegressionConfig rc = config.regression;
        rc.iterations = config.finetune_iterations;
        rc.seed = derive_seed(config.seed, 1000 + 100 * round + i);
        const double before = rloss(res.reg_fake[i], fresh, res.m[i]);
        fit_regression(res.reg_fake[i], train_fake, res.m[i], rc);
        res.report.finetune_rloss.emplace_back(before, rloss(res.reg_fake[i], fresh, res.m[i]));
      }
    }
  }
  return res;
}

}  // namespace adev
