#include "adev/stats_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adev/errors.hpp"

namespace adev {

StatisticKind parse_statistic(const std::string& name) {
  if (name == "hrpcfd") return StatisticKind::hrpcfd;
  if (name == "pcfd") return StatisticKind::pcfd;
  throw ArgumentError("unknown statistic '" + name + "' (expected hrpcfd or pcfd)");
}

std::string to_string(StatisticKind kind) { return kind == StatisticKind::hrpcfd ? "hrpcfd" : "pcfd"; }

TestStatistic::TestStatistic(StatisticKind kind, Discriminator disc) : kind_(kind), disc_(std::move(disc)) {
  require_arg(!disc_.m.empty(), "statistic needs a rank-1 ensemble");
  if (kind_ == StatisticKind::hrpcfd)
    require_arg(!disc_.m2.empty() && disc_.reg_x.size() == disc_.m.size() && disc_.reg_y.size() == disc_.m.size(),
                "high-rank statistic needs rank-2 maps and both regressions");
}

std::vector<std::vector<CMatrix>> TestStatistic::features(const Dataset& pool, int side) const {
  require_arg(side == 0 || side == 1, "side must be 0 or 1");
  const Dataset data = disc_.time_augment ? time_augment(pool) : pool;
  std::vector<std::vector<CMatrix>> out;
  for (std::size_t i = 0; i < disc_.m.size(); ++i) {
    if (kind_ == StatisticKind::pcfd) {
      out.push_back(develop_all(disc_.m[i], data));
      continue;
    }
    const auto& reg = side == 0 ? disc_.reg_x[i] : disc_.reg_y[i];
    const auto cond = predict_cond_dev(reg, data, disc_.m[i]);
    for (const auto& m2 : disc_.m2) out.push_back(develop_rank2_all(m2, cond));
  }
  return out;
}

namespace {

using Features = std::vector<std::vector<CMatrix>>;

double split_statistic(const Features& f0, const Features& f1, const std::vector<std::size_t>& order,
                       std::size_t m) {
  double total = 0.0;
  const std::size_t n = order.size() - m;
  for (std::size_t p = 0; p < f0.size(); ++p) {
    CMatrix a = CMatrix::Zero(f0[p].front().rows(), f0[p].front().cols());
    CMatrix b = a;
    for (std::size_t k = 0; k < m; ++k) a += f0[p][order[k]];
    for (std::size_t k = m; k < order.size(); ++k) b += f1[p][order[k]];
    total += (a / static_cast<double>(m) - b / static_cast<double>(n)).squaredNorm();
  }
  return std::sqrt(total / static_cast<double>(f0.size()));
}

}  // namespace

double TestStatistic::operator()(const Dataset& x, const Dataset& y) const {
  require_arg(!x.empty() && !y.empty(), "statistic needs nonempty samples");
  const Dataset pool = x.concat(y);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  return split_statistic(features(pool, 0), features(pool, 1), order, x.size());
}

TestStatistic fit_test_statistic(const Dataset& x_train, const Dataset& y_train,
                                 const DiscriminatorConfig& config, StatisticKind kind) {
  DiscriminatorConfig c = config;
  if (kind == StatisticKind::pcfd) {
    c.iter2 = 0;
    c.regression.iterations = 0;
  }
  Discriminator disc = train_discriminator(x_train, y_train, c);
  if (kind == StatisticKind::pcfd) {
    disc.reg_x.clear();
    disc.reg_y.clear();
    disc.m2.clear();
  }
  return TestStatistic(kind, std::move(disc));
}

std::size_t quantile_index(std::size_t count, double alpha) {
  require_arg(count >= 1 && alpha > 0.0 && alpha < 1.0, "quantile needs values and 0 < alpha < 1");
  const auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(count)));
  return std::max<std::size_t>(k, 1) - 1;
}

PermutationResult permutation_test(const TestStatistic& stat, const Dataset& x, const Dataset& y,
                                   int permutations, double alpha, std::uint64_t seed, Exec exec) {
  require_arg(permutations >= 20, "at least 20 permutations are required");
  require_arg(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require_arg(x.size() + y.size() >= 10 && !x.empty() && !y.empty(),
              "permutation test needs m + n >= 10 samples");
  const Dataset pool = x.concat(y);
  const Features f0 = stat.features(pool, 0);
  const Features f1 = stat.features(pool, 1);

  PermutationResult r;
  std::vector<std::size_t> identity(pool.size());
  std::iota(identity.begin(), identity.end(), 0);
  r.observed = split_statistic(f0, f1, identity, x.size());

  Rng rng = make_rng(seed, 0);
  std::vector<std::vector<std::size_t>> orders(static_cast<std::size_t>(permutations), identity);
  for (auto& o : orders) std::shuffle(o.begin(), o.end(), rng);
  r.permuted.resize(orders.size());
  for_each_index(exec, orders.size(), [&](std::size_t k) { r.permuted[k] = split_statistic(f0, f1, orders[k], x.size()); });

  std::vector<double> sorted = r.permuted;
  std::sort(sorted.begin(), sorted.end());
  r.quantile = sorted[quantile_index(sorted.size(), alpha)];
  r.reject = r.observed > r.quantile;
  return r;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace

TestReport power_study(const ProcessSpec& a, const ProcessSpec& b, const PowerConfig& config) {
  require_arg(config.runs >= 1 && config.tests_per_run >= 1, "power study needs runs and tests");
  require_arg(config.train_size >= 1 && config.test_size >= 1, "sample sizes must be positive");
  require_shape(a.d == b.d && a.steps == b.steps, "processes must share dimension and length");
  TestReport rep;
  rep.process_a = a.to_string();
  rep.process_b = b.to_string();
  std::vector<double> powers, type_is;
  for (int run = 0; run < config.runs; ++run) {
    RunRecord rec;
    rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(run));
    const Dataset xa = simulate(a, config.train_size, derive_seed(rec.seed, 1));
    const Dataset xb = simulate(b, config.train_size, derive_seed(rec.seed, 2));
    DiscriminatorConfig dc = config.disc;
    dc.seed = derive_seed(rec.seed, 3);
    const TestStatistic stat = fit_test_statistic(xa, xb, dc, config.statistic);
    int h1 = 0, h0 = 0;
    for (int t = 0; t < config.tests_per_run; ++t) {
      const auto base = static_cast<std::uint64_t>(10 + 4 * t);
      const Dataset ta = simulate(a, config.test_size, derive_seed(rec.seed, base));
      const Dataset tb = simulate(b, config.test_size, derive_seed(rec.seed, base + 1));
      const Dataset na = simulate(a, config.test_size, derive_seed(rec.seed, base + 2));
      const Dataset nb = simulate(a, config.test_size, derive_seed(rec.seed, base + 3));
      rec.h1.push_back(permutation_test(stat, ta, tb, config.permutations, config.alpha,
                                        derive_seed(rec.seed, 1000 + 2 * static_cast<std::uint64_t>(t))));
      rec.h0.push_back(permutation_test(stat, na, nb, config.permutations, config.alpha,
                                        derive_seed(rec.seed, 1001 + 2 * static_cast<std::uint64_t>(t))));
      h1 += rec.h1.back().reject ? 1 : 0;
      h0 += rec.h0.back().reject ? 1 : 0;
    }
    rec.power = static_cast<double>(h1) / config.tests_per_run;
    rec.type_i = static_cast<double>(h0) / config.tests_per_run;
    powers.push_back(rec.power);
    type_is.push_back(rec.type_i);
    rep.runs.push_back(std::move(rec));
  }
  std::tie(rep.power, rep.power_std) = mean_std(powers);
  std::tie(rep.type_i, rep.type_i_std) = mean_std(type_is);
  return rep;
}

}  // namespace adev
