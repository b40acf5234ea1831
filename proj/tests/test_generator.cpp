#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "adev/data_eval.hpp"
#include "adev/generator.hpp"

using namespace adev;

namespace {

GeneratorShape small_shape(int d = 2, int past = 3, int steps = 6) {
  GeneratorShape s;
  s.d = d;
  s.past = past;
  s.steps = steps;
  s.noise_dim = 2;
  s.latent_dim = 3;
  s.embed_hidden = {4};
  s.head_hidden = {4};
  return s;
}

GeneratorModel random_generator(const GeneratorShape& s, std::uint64_t seed) {
  GeneratorModel g(s);
  Rng rng(seed);
  g.initialize(rng);
  return g;
}

Dataset with_grid(const std::vector<RMatrix>& v) {
  return Dataset(RVector::LinSpaced(v.front().rows(), 0.0, 1.0), v);
}

double fd_rel(const RMatrix& analytic, const std::function<double(const RMatrix&)>& f, const RMatrix& at) {
  double worst = 0.0, scale = 1e-8;
  const double h = 1e-6;
  for (Eigen::Index r = 0; r < at.rows(); ++r)
    for (Eigen::Index c = 0; c < at.cols(); ++c) {
      RMatrix up = at, down = at;
      up(r, c) += h;
      down(r, c) -= h;
      const double num = (f(up) - f(down)) / (2 * h);
      worst = std::max(worst, std::abs(num - analytic(r, c)));
      scale = std::max(scale, std::abs(num));
    }
  return worst / scale;
}

}  // namespace

TEST_CASE("zero generator outputs zero") {
  const GeneratorModel g(small_shape());
  const RVector out = g.generate_step(RMatrix::Random(4, 2), RVector::Zero(2));
  CHECK(out.norm() == 0.0);
  CHECK(g.rollout(RMatrix::Random(4, 2), RMatrix::Random(3, 2)).norm() == 0.0);
}

TEST_CASE("rollout keeps the past and is deterministic") {
  const auto s = small_shape();
  const GeneratorModel g = random_generator(s, 1);
  const Dataset data = testutil::random_dataset(5, 7, 2, 2);
  Rng rng(3);
  const auto noise = draw_noise(g, 5, rng);
  const auto joint = g.rollout_batch(pasts_of(data, 3), noise);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(joint[i].rows() == 7);
    CHECK((joint[i].topRows(4) - data.values(i).topRows(4)).norm() == 0.0);
    CHECK((joint[i].bottomRows(3) - g.rollout(data.values(i).topRows(4), noise[i])).norm() == 0.0);
  }
  const auto again = g.rollout_batch(pasts_of(data, 3), noise);
  for (std::size_t i = 0; i < 5; ++i) CHECK((again[i] - joint[i]).norm() == 0.0);

  const RVector z = noise[0].row(0).transpose();
  const RVector a = g.generate_step(data.values(0).topRows(4), z);
  CHECK((a - g.generate_step(data.values(0).topRows(4), z)).norm() == 0.0);
  CHECK((a.transpose() - joint[0].row(4)).norm() < 1e-15);

  const GeneratorModel one = random_generator(small_shape(2, 5, 6), 4);
  const RMatrix fut = one.rollout(data.values(0).topRows(6), noise[0].topRows(1));
  CHECK(fut.rows() == 1);
  CHECK((fut.row(0).transpose() - one.generate_step(data.values(0).topRows(6), z)).norm() == 0.0);
  CHECK_THROWS_AS(g.generate_step(RMatrix::Zero(3, 2), z), ShapeError);
}

TEST_CASE("generated steps have stable Monte Carlo moments") {
  const GeneratorModel g = random_generator(small_shape(1, 3, 6), 5);
  const RMatrix window = testutil::random_dataset(1, 4, 1, 6).values(0);
  auto moments = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> nd;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < 10000; ++k) {
      RVector z(2);
      z << nd(rng), nd(rng);
      const double v = g.generate_step(window, z)(0);
      s += v;
      s2 += v * v;
    }
    const double mean = s / 1e4;
    return std::make_pair(mean, s2 / 1e4 - mean * mean);
  };
  const auto [m1, v1] = moments(7);
  const auto [m2, v2] = moments(8);
  CHECK(std::isfinite(m1));
  CHECK(v1 > 0.0);
  CHECK(std::abs(m1 - m2) < 5.0 * std::sqrt(2.0 * v1 / 1e4));
}

TEST_CASE("generator backward matches finite differences") {
  const auto s = small_shape();
  GeneratorModel g = random_generator(s, 9);
  const Dataset data = testutil::random_dataset(3, 7, 2, 10);
  Rng rng(11);
  const auto noise = draw_noise(g, 3, rng);
  std::vector<RMatrix> cot;
  for (int i = 0; i < 3; ++i) cot.push_back(RMatrix::Random(7, 2));
  auto loss = [&](const RVector& p) {
    GeneratorModel h = g;
    h.set_params(p);
    const auto joint = h.rollout_batch(pasts_of(data, 3), noise);
    double l = 0.0;
    for (int i = 0; i < 3; ++i) l += (joint[static_cast<std::size_t>(i)].array() * cot[static_cast<std::size_t>(i)].array()).sum();
    return l;
  };
  RolloutTape tape;
  g.rollout_batch(pasts_of(data, 3), noise, &tape);
  const RVector analytic = g.backward(tape, cot);
  const RVector numeric = finite_difference(loss, g.params(), 1e-6);
  CHECK(max_relative_error(analytic, numeric) < 1e-6);
}

TEST_CASE("EPCFD^2 path gradients match finite differences") {
  const auto ens = sample_map_ensemble(3, 3, 2, 0.6, 12);
  const Dataset x = time_augment(testutil::random_dataset(4, 5, 2, 13));
  const Dataset y = time_augment(testutil::random_dataset(3, 5, 2, 14));
  const auto g = epcfd_squared_with_path_grads(ens, x, y);
  CHECK(g.value == doctest::Approx(epcfd_squared(ens, x, y)).epsilon(1e-12));
  const auto ref = grad_epcfd_squared(ens, x, y);
  for (std::size_t k = 0; k < ens.size(); ++k) CHECK((g.map_grads[k] - ref.grads[k]).norm() < 1e-12);
  for (std::size_t s = 0; s < y.size(); ++s) {
    auto f = [&](const RMatrix& v) {
      auto vals = y.all_values();
      vals[s] = v;
      return epcfd_squared(ens, x, with_grid(vals));
    };
    CHECK(fd_rel(g.y_grads[s], f, y.values(s)) < 1e-6);
  }
}

TEST_CASE("EHRPCFD^2 path gradients match finite differences") {
  const Dataset x = time_augment(testutil::random_dataset(4, 5, 1, 15));
  const Dataset y = time_augment(testutil::random_dataset(3, 5, 1, 16));
  const auto m = sample_map_ensemble(2, 2, 2, 0.6, 17);
  const auto m2 = sample_map_ensemble2(2, 3, 2, true, 0.6, 18);
  std::vector<RegressionModel> reg;
  CondPathsPerMap cx;
  for (std::size_t i = 0; i < m.size(); ++i) {
    reg.emplace_back(2, 2, 5, std::vector<int>{3});
    Rng rng(19 + i);
    reg.back().net().initialize(rng);
    cx.push_back(predict_cond_dev(reg.back(), x, m[i]));
  }
  auto value = [&](const Dataset& yy) {
    CondPathsPerMap cy;
    for (std::size_t i = 0; i < m.size(); ++i) cy.push_back(predict_cond_dev(reg[i], yy, m[i]));
    return ehrpcfd_squared(m2, cx, cy);
  };
  const auto g = ehrpcfd_squared_with_path_grads(m, m2, cx, reg, y);
  CHECK(g.value == doctest::Approx(value(y)).epsilon(1e-12));
  for (std::size_t s = 0; s < y.size(); ++s) {
    auto f = [&](const RMatrix& v) {
      auto vals = y.all_values();
      vals[s] = v;
      return value(with_grid(vals));
    };
    CHECK(fd_rel(g.y_grads[s], f, y.values(s)) < 1e-6);
  }
  CondPathsPerMap cy;
  for (std::size_t i = 0; i < m.size(); ++i) cy.push_back(predict_cond_dev(reg[i], y, m[i]));
  const auto ref = grad_ehrpcfd_squared(m2, cx, cy);
  for (std::size_t j = 0; j < m2.size(); ++j) CHECK((g.m2_grads[j] - ref.grads[j]).norm() < 1e-12);

  SUBCASE("a generator that reproduces the data gives a zero objective") {
    auto same = ehrpcfd_squared_with_path_grads(m, m2, cx, reg, x);
    CHECK(same.value == doctest::Approx(0.0).scale(1.0));
    for (const auto& v : same.m2_grads) CHECK(v.norm() < 1e-14);
  }
}

TEST_CASE("short GAN run on AR(1) data") {
  const Dataset all = simulate_ar1(0.8, 0.3, 1, 10, 400, 21);
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < all.size(); ++i) (i < 300 ? train_idx : test_idx).push_back(i);
  const Dataset train = all.subset(train_idx);
  const Dataset test = all.subset(test_idx);

  GanConfig cfg;
  cfg.shape.d = 1;
  cfg.shape.past = 5;
  cfg.shape.steps = 10;
  cfg.shape.latent_dim = 8;
  cfg.shape.embed_hidden = {16};
  cfg.shape.head_hidden = {16};
  cfg.k1 = 2;
  cfg.n = 2;
  cfg.k2 = 2;
  cfg.m = 4;
  cfg.iter_r = 30;
  cfg.finetune_iterations = 20;
  cfg.batch_size = 32;
  cfg.gen_opt.lr = 2e-3;
  cfg.regression.hidden = {8};
  cfg.regression.iterations = 100;
  cfg.regression.batch_size = 64;
  cfg.seed = 22;

  cfg.phase_a_iterations = 120;
  cfg.phase_c_iterations = 60;
  GeneratorModel init(cfg.shape);
  Rng rng = make_rng(cfg.seed, 4);
  init.initialize(rng);
  const auto res = train_hrpcf_gan(train, cfg);
  CHECK(res.report.phase_a_loss.size() == 120);
  CHECK(res.report.phase_c_loss.size() == 60);
  CHECK(res.report.finetune_rloss.size() == 4);
  for (const auto& [before, after] : res.report.finetune_rloss) CHECK(after <= before * 1.05);

  for (double v : res.report.phase_a_loss) CHECK(std::isfinite(v));
  for (double v : res.report.phase_c_loss) CHECK(std::isfinite(v));
  CHECK((res.phase_a.params() - init.params()).norm() > 0.0);
  CHECK((res.model.params() - res.phase_a.params()).norm() > 0.0);
  const double score = cond_exp_score(cond_exp_input(res.model, test, 50, 23));
  CHECK(std::isfinite(score));

  const auto again = train_hrpcf_gan(train, cfg);
  CHECK(again.model.params() == res.model.params());
  CHECK(again.report.phase_c_loss == res.report.phase_c_loss);

  const Dataset fake = generate_like(res.model, test, 24);
  for (std::size_t i = 0; i < test.size(); ++i)
    CHECK((fake.values(i).topRows(6) - test.values(i).topRows(6)).norm() == 0.0);
  const Dataset other = generate_like(res.model, test, 25);
  int distinct = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    distinct += (fake.values(i) - other.values(i)).norm() > 0.0 ? 1 : 0;
  CHECK(distinct >= static_cast<int>(0.9 * static_cast<double>(test.size())));
}
