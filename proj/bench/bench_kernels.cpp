#include <benchmark/benchmark.h>

#include "adev/data_eval.hpp"
#include "adev/stats_testing.hpp"
#include "adev/train.hpp"

using namespace adev;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

const Dataset& data_x() {
  static const Dataset d = time_augment(simulate_bm(3, 10, 1000, 1));
  return d;
}

const Dataset& data_y() {
  static const Dataset d = time_augment(simulate_fbm(0.4, 3, 10, 1000, 2));
  return d;
}

CondPathsPerMap prefix_paths(const MapEnsemble& ens, const Dataset& data) {
  CondPathsPerMap out;
  for (const auto& m : ens) {
    std::vector<CondDevPath> per;
    for (const auto& v : data.all_values()) per.push_back({past_developments(m, v)});
    out.push_back(std::move(per));
  }
  return out;
}

void BM_develop_all(benchmark::State& s) {
  const auto ens = sample_map_ensemble(4, 5, 1, 0.5, 3);
  for (auto _ : s) benchmark::DoNotOptimize(develop_all(ens[0], data_x(), exec_of(s)));
}

void BM_grad_epcfd(benchmark::State& s) {
  const auto ens = sample_map_ensemble(4, 5, 4, 0.5, 4);
  for (auto _ : s) benchmark::DoNotOptimize(grad_epcfd_squared(ens, data_x(), data_y(), exec_of(s)));
}

void BM_grad_ehrpcfd(benchmark::State& s) {
  const auto m = sample_map_ensemble(4, 3, 1, 0.5, 5);
  const auto m2 = sample_map_ensemble2(3, 13, 10, true, 0.2, 6);
  std::vector<std::size_t> first(200);
  for (std::size_t i = 0; i < first.size(); ++i) first[i] = i;
  const auto cx = prefix_paths(m, data_x().subset(first));
  const auto cy = prefix_paths(m, data_y().subset(first));
  for (auto _ : s) benchmark::DoNotOptimize(grad_ehrpcfd_squared(m2, cx, cy, exec_of(s)));
}

void BM_permutation_test(benchmark::State& s) {
  Discriminator disc;
  disc.m = sample_map_ensemble(4, 5, 4, 0.5, 7);
  const TestStatistic stat(StatisticKind::pcfd, disc);
  const Dataset x = simulate_bm(3, 10, 200, 8);
  const Dataset y = simulate_fbm(0.4, 3, 10, 200, 9);
  for (auto _ : s) benchmark::DoNotOptimize(permutation_test(stat, x, y, 200, 0.05, 10, exec_of(s)));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_develop_all)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grad_epcfd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grad_ehrpcfd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_permutation_test)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
