#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "adev/data_eval.hpp"
#include "adev/path.hpp"

namespace testutil {

inline adev::CMatrix random_complex(int n, std::uint64_t seed, double scale = 1.0) {
  adev::Rng rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  adev::CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = adev::Complex(nd(rng), nd(rng));
  return m;
}

inline adev::AntiHermitian random_algebra(int n, std::uint64_t seed, double scale = 1.0) {
  return adev::AntiHermitian::project(random_complex(n, seed, scale));
}

// Random walk dataset on a uniform grid.
inline adev::Dataset random_dataset(int n_samples, int length, int d, std::uint64_t seed,
                                    double step = 0.3) {
  adev::Rng rng(seed);
  std::normal_distribution<double> nd(0.0, step);
  std::vector<adev::RMatrix> v;
  for (int i = 0; i < n_samples; ++i) {
    adev::RMatrix x(length, d);
    for (int c = 0; c < d; ++c) x(0, c) = nd(rng);
    for (int t = 1; t < length; ++t)
      for (int c = 0; c < d; ++c) x(t, c) = x(t - 1, c) + nd(rng);
    v.push_back(x);
  }
  return adev::Dataset(adev::RVector::LinSpaced(length, 0.0, 1.0), std::move(v));
}

// Taylor series of exp, summed to 40 terms.
inline adev::CMatrix taylor_exp(const adev::CMatrix& a) {
  adev::CMatrix term = adev::CMatrix::Identity(a.rows(), a.cols());
  adev::CMatrix sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// Largest |empirical - gamma(k)| / sigma over the increment covariance
// matrix, with increments rescaled to unit variance by T^H and pooled over
// channels. sigma^2 = (gamma(0)^2 + gamma(k)^2) / count for a zero-mean
// Gaussian pair.
inline double fgn_covariance_zmax(const adev::Dataset& data, double hurst) {
  const auto steps = static_cast<int>(data.length() - 1);
  const double scale = std::pow(static_cast<double>(steps), hurst);
  adev::RMatrix acc = adev::RMatrix::Zero(steps, steps);
  double count = 0.0;
  for (const auto& v : data.all_values())
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      adev::RVector inc(steps);
      for (int k = 0; k < steps; ++k) inc(k) = (v(k + 1, c) - v(k, c)) * scale;
      acc += inc * inc.transpose();
      count += 1.0;
    }
  acc /= count;
  double worst = 0.0;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      const double g = adev::fgn_autocovariance(hurst, a - b);
      const double sigma = std::sqrt((1.0 + g * g) / count);
      worst = std::max(worst, std::abs(acc(a, b) - g) / sigma);
    }
  return worst;
}

// Largest deviation, in standard errors, of the lag-k increment
// autocovariance (averaged over start positions) from gamma(k). The standard
// error comes from the spread of the per-path statistics.
inline double fgn_autocovariance_zmax(const adev::Dataset& data, double hurst) {
  const auto steps = static_cast<int>(data.length() - 1);
  const double scale = std::pow(static_cast<double>(steps), hurst);
  std::vector<std::vector<double>> stats(static_cast<std::size_t>(steps));
  for (const auto& v : data.all_values())
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      adev::RVector inc(steps);
      for (int k = 0; k < steps; ++k) inc(k) = (v(k + 1, c) - v(k, c)) * scale;
      for (int lag = 0; lag < steps; ++lag) {
        double s = 0.0;
        for (int a = 0; a + lag < steps; ++a) s += inc(a) * inc(a + lag);
        stats[static_cast<std::size_t>(lag)].push_back(s / static_cast<double>(steps - lag));
      }
    }
  double worst = 0.0;
  for (int lag = 0; lag < steps; ++lag) {
    const auto& s = stats[static_cast<std::size_t>(lag)];
    const double n = static_cast<double>(s.size());
    double mean = 0.0, sq = 0.0;
    for (double x : s) mean += x;
    mean /= n;
    for (double x : s) sq += (x - mean) * (x - mean);
    const double se = std::sqrt(sq / (n - 1.0) / n);
    worst = std::max(worst, std::abs(mean - adev::fgn_autocovariance(hurst, lag)) / se);
  }
  return worst;
}

}  // namespace testutil
