#include <benchmark/benchmark.h>

#include <vector>

#include "kpzc/dimension.hpp"
#include "kpzc/measure.hpp"
#include "kpzc/sets.hpp"
#include "kpzc/weights.hpp"

namespace {

const std::vector<double> kGrid{0.2, 0.4, 0.6, 0.8};

void BM_PartitionTableLebesgueCantor(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto m = kpzc::MeasureOracle::lebesgue(2);
  const auto set = kpzc::SetOracle::cantor(2, {0, 3});
  for (auto _ : state)
    benchmark::DoNotOptimize(kpzc::partition_table(m, set, {n / 2, n}, kGrid));
}
BENCHMARK(BM_PartitionTableLebesgueCantor)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PartitionTableCascade(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bool cantor = state.range(1) != 0;
  const auto m = kpzc::MeasureOracle::cascade(
      kpzc::CascadeMeasure(11, kpzc::parse_weight_model("lognormal(sigma2=0.5)", 2)));
  const auto set = cantor ? kpzc::SetOracle::cantor(2, {0, 3}) : kpzc::SetOracle::full_cube(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(kpzc::partition_table(m, set, {n / 2, n}, kGrid));
}
BENCHMARK(BM_PartitionTableCascade)
    ->Args({8, 0})->Args({10, 0})->Args({12, 1})->Args({16, 1})
    ->Unit(benchmark::kMillisecond);

void BM_EstimateDimensionCantor(benchmark::State& state) {
  const kpzc::CascadeFamily family{kpzc::parse_weight_model("lognormal(sigma2=0.5)", 2),
                                   kpzc::CubeWeighting::product_per_axis, kpzc::TailRule::mean_one()};
  const auto set = kpzc::SetOracle::cantor(2, {0, 3});
  kpzc::EstimatorConfig cfg;
  cfg.n_range = {8, 14};
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  for (auto _ : state)
    benchmark::DoNotOptimize(kpzc::estimate_dimension(family, set, cfg, seeds).zeta_hat);
}
BENCHMARK(BM_EstimateDimensionCantor)->Unit(benchmark::kMillisecond);

}  // namespace
