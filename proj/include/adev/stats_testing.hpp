#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adev/data_eval.hpp"
#include "adev/train.hpp"

namespace adev {

enum class StatisticKind { hrpcfd, pcfd };

StatisticKind parse_statistic(const std::string& name);
std::string to_string(StatisticKind kind);

/// A trained two-sample statistic. For hrpcfd the first argument is always
/// pushed through the X regressions and the second through the Y regressions.
class TestStatistic {
 public:
  TestStatistic() = default;
  TestStatistic(StatisticKind kind, Discriminator disc);

  StatisticKind kind() const { return kind_; }
  const Discriminator& discriminator() const { return disc_; }

  double operator()(const Dataset& x, const Dataset& y) const;

  /// Unitary features of every sample of `pool`, as if it belonged to the
  /// first (side 0) or the second (side 1) argument. Layout: [pair][sample].
  std::vector<std::vector<CMatrix>> features(const Dataset& pool, int side) const;

 private:
  StatisticKind kind_ = StatisticKind::hrpcfd;
  Discriminator disc_;
};

/// hrpcfd: full three-stage training. pcfd: stage 1 only.
TestStatistic fit_test_statistic(const Dataset& x_train, const Dataset& y_train,
                                 const DiscriminatorConfig& config,
                                 StatisticKind kind = StatisticKind::hrpcfd);

struct PermutationResult {
  double observed = 0.0;
  double quantile = 0.0;
  bool reject = false;
  std::vector<double> permuted;
};

/// Index of the (1 - alpha) empirical quantile in the ascending sort of M
/// values: ceil((1 - alpha) M) - 1.
std::size_t quantile_index(std::size_t count, double alpha);

/// Rejects when the observed statistic is strictly above the (1 - alpha)
/// quantile of the statistic over random re-splits of the pooled sample.
PermutationResult permutation_test(const TestStatistic& stat, const Dataset& x, const Dataset& y,
                                   int permutations, double alpha, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

struct PowerConfig {
  int runs = 5;
  int tests_per_run = 1;
  int train_size = 200;  // per group
  int test_size = 200;   // per group
  int permutations = 200;
  double alpha = 0.05;
  StatisticKind statistic = StatisticKind::hrpcfd;
  DiscriminatorConfig disc;
  std::uint64_t seed = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<PermutationResult> h1;
  std::vector<PermutationResult> h0;
  double power = 0.0;
  double type_i = 0.0;
};

struct TestReport {
  std::string process_a;
  std::string process_b;
  std::vector<RunRecord> runs;
  double power = 0.0;  // mean over runs
  double power_std = 0.0;
  double type_i = 0.0;
  double type_i_std = 0.0;
};

/// Each run trains a statistic on fresh samples of (a, b) and then runs
/// tests_per_run permutation tests on independent held-out pairs: (a, b) for
/// the power and (a, a') for the Type-I error.
TestReport power_study(const ProcessSpec& a, const ProcessSpec& b, const PowerConfig& config);

}  // namespace adev
