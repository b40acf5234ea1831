#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adev/cond_regression.hpp"
#include "adev/path.hpp"

namespace adev {

// ---------------------------------------------------------------------------
// Synthetic processes. Paths live on the grid t_k = k / T, k = 0..T, and
// start at 0 unless stated otherwise.

enum class FbmMethod { hosking, cholesky };

/// fGn autocovariance for unit steps: 0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H).
double fgn_autocovariance(double hurst, int lag);

/// Durbin-Levinson coefficients of fractional Gaussian noise, shared by all
/// samples of one simulation.
class HoskingRecursion {
 public:
  HoskingRecursion(double hurst, int steps);
  /// Maps i.i.d. N(0,1) draws to one fGn sample with unit step variance.
  RVector sample(const RVector& z) const;
  int steps() const { return steps_; }

 private:
  int steps_;
  std::vector<RVector> phi_;  // phi_[k] holds phi_{k,1..k}
  RVector sd_;
};

Dataset simulate_fbm(double hurst, int d, int steps, int n_samples, std::uint64_t seed,
                     FbmMethod method = FbmMethod::hosking);

Dataset simulate_bm(int d, int steps, int n_samples, std::uint64_t seed);

/// x_{t+1} = phi x_t + sigma eps_t with a stationary start.
Dataset simulate_ar1(double phi, double sigma, int d, int steps, int n_samples, std::uint64_t seed);

/// Two-path processes on t = 0, 1, 2: (1, 1 + 1/n, 2) and (1, 1 - 1/n, 0)
/// with probability 1/2 each; n_param = 0 gives the limit (1,1,2), (1,1,0).
FiniteProcessSpec aldous_spec(int n_param);
Dataset sample_finite(const FiniteProcessSpec& spec, int n_samples, std::uint64_t seed);

struct ProcessSpec {
  std::string kind = "bm";  // bm, fbm, ar1, aldous
  double hurst = 0.5;
  double phi = 0.8;
  double sigma = 0.1;
  int aldous_n = 0;
  int d = 1;
  int steps = 10;

  /// "bm", "fbm:0.25", "ar1:0.8:0.1", "aldous:10", "aldous:limit".
  static ProcessSpec parse(const std::string& text, int d, int steps);
  std::string to_string() const;
};

Dataset simulate(const ProcessSpec& spec, int n_samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics

struct CondExpInput {
  std::vector<RMatrix> real_future;     // observed future of each sample
  std::vector<RMatrix> fake_mean_future;  // Monte Carlo mean of generated futures
};

struct MetricReport {
  double acf = 0.0;
  double cross_corr = 0.0;
  std::optional<double> cond_exp;
  double onnd = 0.0;
};

/// Autocorrelation per channel and lag tau = 1..L-1, centered and scaled
/// with the mean and variance pooled over samples and time.
RMatrix autocorrelation(const Dataset& data);
double acf_score(const Dataset& real, const Dataset& fake);
/// sum_{s,t>=1} sum_{i,j} |rho(X^i_s, X^j_t) - rho(Y^i_s, Y^j_t)|; rho = 0
/// when either series is constant.
double cross_corr_score(const Dataset& real, const Dataset& fake);
double cond_exp_score(const CondExpInput& input);
double onnd_score(const Dataset& real, const Dataset& fake);

MetricReport eval_metrics(const Dataset& real, const Dataset& fake,
                          const std::optional<CondExpInput>& cond = std::nullopt);

}  // namespace adev
