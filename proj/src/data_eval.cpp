#include "adev/data_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adev/csv.hpp"
#include "adev/errors.hpp"

namespace adev {

double fgn_autocovariance(double hurst, int lag) {
  const double k = std::abs(static_cast<double>(lag));
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

HoskingRecursion::HoskingRecursion(double hurst, int steps) : steps_(steps) {
  require_arg(hurst > 0.0 && hurst < 1.0, "Hurst parameter must lie in (0, 1)");
  require_arg(steps >= 1, "fBM needs at least one step");
  phi_.resize(static_cast<std::size_t>(steps));
  sd_.resize(steps);
  double v = 1.0;
  sd_(0) = 1.0;
  for (int k = 1; k < steps; ++k) {
    const RVector& prev = phi_[static_cast<std::size_t>(k - 1)];
    double num = fgn_autocovariance(hurst, k);
    for (int j = 1; j < k; ++j) num -= prev(j - 1) * fgn_autocovariance(hurst, k - j);
    const double kk = num / v;
    RVector cur(k);
    for (int j = 1; j < k; ++j) cur(j - 1) = prev(j - 1) - kk * prev(k - j - 1);
    cur(k - 1) = kk;
    v *= 1.0 - kk * kk;
    if (!(v > 0.0)) throw NumericError("fGn covariance is not positive definite");
    phi_[static_cast<std::size_t>(k)] = std::move(cur);
    sd_(k) = std::sqrt(v);
  }
}

RVector HoskingRecursion::sample(const RVector& z) const {
  require_shape(z.size() == steps_, "Hosking: wrong number of normal draws");
  RVector x(steps_);
  for (int k = 0; k < steps_; ++k) {
    double mean = 0.0;
    const RVector& p = phi_[static_cast<std::size_t>(k)];
    for (int j = 1; j <= k; ++j) mean += p(j - 1) * x(k - j);
    x(k) = mean + sd_(k) * z(k);
  }
  return x;
}

namespace {

RVector grid(int steps) { return RVector::LinSpaced(steps + 1, 0.0, 1.0); }

RVector normals(Rng& rng, int count) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RVector z(count);
  for (int k = 0; k < count; ++k) z(k) = nd(rng);
  return z;
}

}  // namespace

Dataset simulate_fbm(double hurst, int d, int steps, int n_samples, std::uint64_t seed,
                     FbmMethod method) {
  require_arg(hurst > 0.0 && hurst < 1.0, "Hurst parameter must lie in (0, 1)");
  require_arg(d >= 1 && steps >= 1 && n_samples >= 1, "fBM sizes must be positive");
  const double scale = std::pow(1.0 / static_cast<double>(steps), hurst);
  std::optional<HoskingRecursion> hosking;
  RMatrix chol;
  if (method == FbmMethod::hosking) {
    hosking.emplace(hurst, steps);
  } else {
    RMatrix cov(steps, steps);
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) cov(i, j) = fgn_autocovariance(hurst, i - j);
    Eigen::LLT<RMatrix> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("fGn covariance is not positive definite");
    chol = llt.matrixL();
  }
  std::vector<RMatrix> values(static_cast<std::size_t>(n_samples));
  for_each_index(Exec::parallel, values.size(), [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    RMatrix v = RMatrix::Zero(steps + 1, d);
    for (int c = 0; c < d; ++c) {
      const RVector z = normals(rng, steps);
      const RVector inc = hosking ? hosking->sample(z) : RVector(chol * z);
      for (int k = 0; k < steps; ++k) v(k + 1, c) = v(k, c) + scale * inc(k);
    }
    values[i] = std::move(v);
  });
  return Dataset(grid(steps), std::move(values));
}

Dataset simulate_bm(int d, int steps, int n_samples, std::uint64_t seed) {
  return simulate_fbm(0.5, d, steps, n_samples, seed);
}

Dataset simulate_ar1(double phi, double sigma, int d, int steps, int n_samples, std::uint64_t seed) {
  require_arg(std::abs(phi) < 1.0, "AR(1) coefficient must satisfy |phi| < 1");
  require_arg(sigma > 0.0, "AR(1) noise scale must be positive");
  require_arg(d >= 1 && steps >= 1 && n_samples >= 1, "AR(1) sizes must be positive");
  const double sd0 = sigma / std::sqrt(1.0 - phi * phi);
  std::vector<RMatrix> values(static_cast<std::size_t>(n_samples));
  for (std::size_t i = 0; i < values.size(); ++i) {
    Rng rng = make_rng(seed, i);
    std::normal_distribution<double> nd(0.0, 1.0);
    RMatrix v(steps + 1, d);
    for (int c = 0; c < d; ++c) v(0, c) = sd0 * nd(rng);
    for (int k = 0; k < steps; ++k)
      for (int c = 0; c < d; ++c) v(k + 1, c) = phi * v(k, c) + sigma * nd(rng);
    values[i] = std::move(v);
  }
  return Dataset(grid(steps), std::move(values));
}

FiniteProcessSpec aldous_spec(int n_param) {
  require_arg(n_param >= 0, "family index must be >= 1 (or 0 for the limit)");
  const double eps = n_param == 0 ? 0.0 : 1.0 / static_cast<double>(n_param);
  FiniteProcessSpec s;
  s.times = RVector::LinSpaced(3, 0.0, 2.0);
  RMatrix up(3, 1), down(3, 1);
  up << 1.0, 1.0 + eps, 2.0;
  down << 1.0, 1.0 - eps, 0.0;
  s.paths = {up, down};
  s.probs = {0.5, 0.5};
  return s;
}

Dataset sample_finite(const FiniteProcessSpec& spec, int n_samples, std::uint64_t seed) {
  spec.validate();
  require_arg(n_samples >= 1, "sample count must be positive");
  Rng rng = make_rng(seed, 0);
  std::discrete_distribution<std::size_t> pick(spec.probs.begin(), spec.probs.end());
  std::vector<RMatrix> values;
  for (int i = 0; i < n_samples; ++i) values.push_back(spec.paths[pick(rng)]);
  return Dataset(spec.times, std::move(values));
}

ProcessSpec ProcessSpec::parse(const std::string& text, int d, int steps) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  require_arg(!parts.empty(), "empty process spec");
  ProcessSpec s;
  s.kind = parts[0];
  s.d = d;
  s.steps = steps;
  auto number = [&](std::size_t k) {
    require_arg(k < parts.size(), "process spec '" + text + "' is missing a parameter");
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[k], &used);
      if (used != parts[k].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ArgumentError("process spec '" + text + "' has a non-numeric parameter");
    }
  };
  if (s.kind == "bm") {
    s.hurst = 0.5;
  } else if (s.kind == "fbm") {
    s.hurst = number(1);
    require_arg(s.hurst > 0.0 && s.hurst < 1.0, "Hurst parameter must lie in (0, 1)");
  } else if (s.kind == "ar1") {
    s.phi = number(1);
    s.sigma = number(2);
  } else if (s.kind == "aldous") {
    require_arg(parts.size() >= 2, "aldous spec needs an index or 'limit'");
    s.aldous_n = parts[1] == "limit" ? 0 : static_cast<int>(number(1));
    require_arg(parts[1] == "limit" || s.aldous_n >= 1, "aldous index must be >= 1");
  } else {
    throw ArgumentError("unknown process kind '" + s.kind + "'");
  }
  return s;
}

std::string ProcessSpec::to_string() const {
  if (kind == "fbm") return "fbm:" + format_double(hurst);
  if (kind == "ar1") return "ar1:" + format_double(phi) + ":" + format_double(sigma);
  if (kind == "aldous") return "aldous:" + (aldous_n == 0 ? std::string("limit") : std::to_string(aldous_n));
  return kind;
}

Dataset simulate(const ProcessSpec& spec, int n_samples, std::uint64_t seed) {
  if (spec.kind == "bm") return simulate_bm(spec.d, spec.steps, n_samples, seed);
  if (spec.kind == "fbm") return simulate_fbm(spec.hurst, spec.d, spec.steps, n_samples, seed);
  if (spec.kind == "ar1") return simulate_ar1(spec.phi, spec.sigma, spec.d, spec.steps, n_samples, seed);
  if (spec.kind == "aldous") return sample_finite(aldous_spec(spec.aldous_n), n_samples, seed);
  throw ArgumentError("unknown process kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------------------

namespace {

void check_pair(const Dataset& a, const Dataset& b) {
  require_shape(a.length() == b.length() && a.dim() == b.dim(),
                "real and fake data must share length and dimension");
}

double correlation(const RVector& a, const RVector& b) {
  const RVector ca = a.array() - a.mean();
  const RVector cb = b.array() - b.mean();
  const double sa = ca.norm();
  const double sb = cb.norm();
  if (sa == 0.0 || sb == 0.0) return 0.0;
  return ca.dot(cb) / (sa * sb);
}

}  // namespace

RMatrix autocorrelation(const Dataset& data) {
  const auto l = data.length();
  const auto d = data.dim();
  RMatrix acf = RMatrix::Zero(l - 1, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    double mean = 0.0;
    for (const auto& v : data.all_values()) mean += v.col(c).sum();
    mean /= static_cast<double>(data.size() * static_cast<std::size_t>(l));
    double var = 0.0;
    for (const auto& v : data.all_values()) var += (v.col(c).array() - mean).square().sum();
    var /= static_cast<double>(data.size() * static_cast<std::size_t>(l));
    if (var == 0.0) continue;
    for (Eigen::Index tau = 1; tau < l; ++tau) {
      double s = 0.0;
      for (const auto& v : data.all_values())
        for (Eigen::Index t = 0; t + tau < l; ++t) s += (v(t, c) - mean) * (v(t + tau, c) - mean);
      acf(tau - 1, c) = s / (static_cast<double>(data.size() * static_cast<std::size_t>(l - tau)) * var);
    }
  }
  return acf;
}

double acf_score(const Dataset& real, const Dataset& fake) {
  check_pair(real, fake);
  return (autocorrelation(real) - autocorrelation(fake)).cwiseAbs().sum();
}

double cross_corr_score(const Dataset& real, const Dataset& fake) {
  check_pair(real, fake);
  const auto l = real.length();
  const auto d = real.dim();
  auto column = [](const Dataset& data, Eigen::Index t, Eigen::Index c) {
    RVector v(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) v(static_cast<Eigen::Index>(i)) = data.values(i)(t, c);
    return v;
  };
  double score = 0.0;
  for (Eigen::Index s = 1; s < l; ++s)
    for (Eigen::Index t = 1; t < l; ++t)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          score += std::abs(correlation(column(real, s, i), column(real, t, j)) -
                            correlation(column(fake, s, i), column(fake, t, j)));
  return score;
}

double cond_exp_score(const CondExpInput& input) {
  require_shape(!input.real_future.empty() && input.real_future.size() == input.fake_mean_future.size(),
                "conditional-expectation score needs one fake mean per real sample");
  double s = 0.0;
  for (std::size_t i = 0; i < input.real_future.size(); ++i) {
    require_shape(input.real_future[i].rows() == input.fake_mean_future[i].rows() &&
                      input.real_future[i].cols() == input.fake_mean_future[i].cols(),
                  "future blocks differ in shape");
    s += (input.real_future[i] - input.fake_mean_future[i]).norm();
  }
  return s / static_cast<double>(input.real_future.size());
}

double onnd_score(const Dataset& real, const Dataset& fake) {
  check_pair(real, fake);
  std::vector<double> best(real.size());
  for_each_index(Exec::parallel, real.size(), [&](std::size_t i) {
    double b = std::numeric_limits<double>::infinity();
    for (const auto& f : fake.all_values()) b = std::min(b, (real.values(i) - f).squaredNorm());
    best[i] = std::sqrt(b);
  });
  double s = 0.0;
  for (double b : best) s += b;
  return s / static_cast<double>(real.size());
}

MetricReport eval_metrics(const Dataset& real, const Dataset& fake,
                          const std::optional<CondExpInput>& cond) {
  check_pair(real, fake);
  MetricReport r;
  r.acf = acf_score(real, fake);
  r.cross_corr = cross_corr_score(real, fake);
  if (cond) r.cond_exp = cond_exp_score(*cond);
  r.onnd = onnd_score(real, fake);
  return r;
}

}  // namespace adev
