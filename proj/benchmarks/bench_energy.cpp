#include <benchmark/benchmark.h>

#include "kpzc/energy.hpp"
#include "kpzc/measure.hpp"
#include "kpzc/sets.hpp"
#include "kpzc/weights.hpp"

namespace {

void BM_SampleNaturalMeasure(benchmark::State& state) {
  const auto set = kpzc::SetOracle::cantor(2, {0, 3});
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kpzc::sample_natural_measure(set, 12, count, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleNaturalMeasure)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

// Exact pairs up to kExactPairLimit points; subsampled pairs above it.
void BM_SEnergy(benchmark::State& state) {
  const bool cascade = state.range(1) != 0;
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto set = kpzc::SetOracle::full_cube(2);
  const auto points = kpzc::sample_natural_measure(set, 10, count, 9);
  const auto m = cascade
                     ? kpzc::MeasureOracle::cascade(kpzc::CascadeMeasure(
                           3, kpzc::parse_weight_model("lognormal(sigma2=0.5)", 2)))
                     : kpzc::MeasureOracle::lebesgue(2);
  for (auto _ : state) benchmark::DoNotOptimize(kpzc::s_energy(m, points, 0.7, 10).value);
}
BENCHMARK(BM_SEnergy)
    ->Args({500, 0})->Args({2000, 0})->Args({500, 1})->Args({8000, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace
