#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "adev/cond_regression.hpp"
#include "adev/data_eval.hpp"
#include "adev/errors.hpp"

using namespace adev;

namespace {

// Two-state chain on t = 0..3 with sticky transitions.
FiniteProcessSpec markov_spec() {
  FiniteProcessSpec s;
  s.times = RVector::LinSpaced(4, 0.0, 1.0);
  const double stay = 0.8;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        RMatrix v(4, 1);
        v << 0.0, a ? 1.0 : -1.0, b ? 1.0 : -1.0, c ? 1.0 : -1.0;
        s.paths.push_back(v);
        s.probs.push_back(0.5 * (a == b ? stay : 1 - stay) * (b == c ? stay : 1 - stay));
      }
  return s;
}

}  // namespace

TEST_CASE("oracle properties") {
  const auto spec = time_augment(markov_spec());
  const auto m = sample_map_ensemble(2, 2, 1, 0.8, 1).front();
  const auto cond = oracle_cond_dev(spec, m);
  for (std::size_t k = 0; k < spec.paths.size(); ++k) {
    const CMatrix full = develop(m, PiecewisePath(spec.times, spec.paths[k]));
    CHECK((cond[k].steps.back() - full).norm() == 0.0);
  }
  // Tower property: the mean over the support equals the PCF at every t.
  CMatrix phi = CMatrix::Zero(2, 2);
  for (std::size_t k = 0; k < spec.paths.size(); ++k)
    phi += spec.probs[k] * develop(m, PiecewisePath(spec.times, spec.paths[k]));
  for (std::size_t t = 0; t < 4; ++t) {
    CMatrix mean = CMatrix::Zero(2, 2);
    for (std::size_t k = 0; k < spec.paths.size(); ++k) mean += spec.probs[k] * cond[k].steps[t];
    CHECK((mean - phi).norm() < 1e-12);
  }
  // Dirac process.
  FiniteProcessSpec dirac{spec.times, {spec.paths[3]}, {1.0}};
  const auto d = oracle_cond_dev(dirac, m);
  for (const auto& s : d[0].steps) CHECK((s - d[0].steps.back()).norm() < 1e-14);

  FiniteProcessSpec zero{spec.times, {spec.paths[0], spec.paths[1]}, {1.0, 0.0}};
  CHECK_THROWS_AS(oracle_cond_dev(zero, m), ArgumentError);
}

TEST_CASE("assembly of exact future predictions reproduces the oracle") {
  const auto spec = time_augment(markov_spec());
  const auto m = sample_map_ensemble(2, 3, 1, 0.8, 2).front();
  const auto cond = oracle_cond_dev(spec, m);
  // The conditional mean of the future development, as a perfect model would output it.
  std::vector<std::vector<CMatrix>> preds;
  for (std::size_t k = 0; k < spec.paths.size(); ++k) {
    const auto past = past_developments(m, spec.paths[k]);
    std::vector<CMatrix> p;
    for (std::size_t t = 0; t < past.size(); ++t) p.push_back(past[t].adjoint() * cond[k].steps[t]);
    preds.push_back(p);
  }
  const Dataset data(spec.times, spec.paths);
  const auto assembled = assemble_cond_dev(m, data, preds);
  for (std::size_t k = 0; k < spec.paths.size(); ++k)
    for (std::size_t t = 0; t < 4; ++t) CHECK((assembled[k].steps[t] - cond[k].steps[t]).norm() < 1e-8);
}

TEST_CASE("rloss matches a direct double loop") {
  const Dataset data = time_augment(testutil::random_dataset(6, 5, 2, 3));
  const auto m = sample_map_ensemble(3, 2, 1, 0.8, 4).front();
  RegressionModel model(2, 3, 5, {4, 4});
  Rng rng(5);
  model.net().initialize(rng);
  const auto pred = model.predict(data);
  double brute = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto fut = future_developments(m, data.values(i));
    for (std::size_t t = 0; t < 5; ++t) brute += hs_distance_squared(pred[i][t], fut[t]);
  }
  brute /= static_cast<double>(data.size() * 5);
  CHECK(rloss(model, data, m) == doctest::Approx(brute).epsilon(1e-12));

  // A constant dataset has identity futures.
  std::vector<RMatrix> flat(3, RMatrix::Constant(4, 3, 0.5));
  const Dataset constant(RVector::LinSpaced(4, 0, 1), flat);
  for (const auto& f : future_developments(m, flat[0])) CHECK((f - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("regression learns a Dirac process") {
  const auto m = sample_map_ensemble(2, 2, 1, 0.5, 6).front();
  const Dataset single = time_augment(testutil::random_dataset(1, 6, 1, 7));
  std::vector<RMatrix> copies(64, single.values(0));
  const Dataset data(single.times(), copies);
  RegressionConfig cfg;
  cfg.hidden = {16, 16};
  cfg.iterations = 500;
  cfg.batch_size = 32;
  cfg.opt.lr = 1e-2;
  cfg.patience = 500;
  cfg.seed = 8;
  RegressionCurve curve;
  const auto model = train_regression(data, m, cfg, &curve);
  CHECK(rloss(model, data, m) < 1e-3);
  CHECK(curve.best_val_loss < curve.val_loss.front());
}

TEST_CASE("regression recovers the conditional paths of a Markov chain") {
  const auto spec = time_augment(markov_spec());
  const auto m = sample_map_ensemble(2, 2, 1, 0.8, 9).front();
  const Dataset data = sample_finite(spec, 2000, 10);
  RegressionConfig cfg;
  cfg.iterations = 1500;
  cfg.batch_size = 128;
  cfg.opt.lr = 5e-3;
  cfg.patience = 300;
  cfg.seed = 11;
  const auto model = train_regression(data, m, cfg);
  const auto oracle = oracle_cond_dev(spec, m);
  const Dataset support(spec.times, spec.paths);
  const auto pred = predict_cond_dev(model, support, m);
  double err = 0.0;
  for (std::size_t k = 0; k < spec.paths.size(); ++k) {
    double e = 0.0;
    for (std::size_t t = 0; t < 4; ++t) e += hs_distance(pred[k].steps[t], oracle[k].steps[t]);
    err += spec.probs[k] * e / 4.0;
  }
  CHECK(err < 0.05);

  // Shuffling the training order changes the final loss by little.
  std::vector<std::size_t> rev(data.size());
  for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = rev.size() - 1 - i;
  const auto model2 = train_regression(data.subset(rev), m, cfg);
  const double a = rloss(model, data, m);
  const double b = rloss(model2, data, m);
  CHECK(std::abs(a - b) / a < 0.1);
}

TEST_CASE("regression input validation") {
  const auto m = sample_map_ensemble(2, 2, 1, 0.5, 6).front();
  RegressionModel model(2, 2, 5, {4});
  const Dataset wrong = testutil::random_dataset(3, 4, 2, 1);
  CHECK_THROWS_AS(predict_cond_dev(model, wrong, m), ShapeError);
}
