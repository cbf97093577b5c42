#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>

#include "kpzc/cascade.hpp"
#include "kpzc/weights.hpp"

namespace {

kpzc::CascadeMeasure make_cascade(int d, const char* weight) {
  return kpzc::CascadeMeasure(7, kpzc::parse_weight_model(weight, d));
}

void BM_NodeWeight(benchmark::State& state, const char* weight) {
  const int d = static_cast<int>(state.range(0));
  const auto c = make_cascade(d, weight);
  std::array<std::uint64_t, 8> idx{};
  std::uint64_t i = 0;
  for (auto _ : state) {
    idx[0] = i++ & 0xFFFFF;
    const auto a = kpzc::DyadicAddress::from_indices(d, 20, std::span(idx.data(), std::size_t(d)));
    benchmark::DoNotOptimize(kpzc::log2_node_weight(c, a));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_NodeWeight, lognormal, "lognormal(sigma2=0.5)")->Arg(1)->Arg(2)->Arg(3);
BENCHMARK_CAPTURE(BM_NodeWeight, twopoint, "twopoint(a=0.5,b=1.5,p=0.5)")->Arg(1)->Arg(2)->Arg(3);

void BM_TotalMass(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto c = make_cascade(d, "lognormal(sigma2=0.5)");
  for (auto _ : state) benchmark::DoNotOptimize(kpzc::total_mass(c, n));
  // Nodes visited: sum_{k=1..n} 2^{kd}.
  std::int64_t nodes = 0;
  for (int k = 1; k <= n; ++k) nodes += std::int64_t{1} << (k * d);
  state.SetItemsProcessed(state.iterations() * nodes);
}
BENCHMARK(BM_TotalMass)->Args({1, 16})->Args({2, 8})->Args({2, 10})->Args({3, 6})
    ->Unit(benchmark::kMillisecond);

void BM_CubeMass(benchmark::State& state) {
  const int extra = static_cast<int>(state.range(0));
  const auto c = make_cascade(2, "lognormal(sigma2=0.5)");
  const auto a = kpzc::DyadicAddress::from_path(2, {1, 2, 3, 0});
  for (auto _ : state) benchmark::DoNotOptimize(kpzc::mass(c, a, a.depth() + extra).log2_mass);
}
BENCHMARK(BM_CubeMass)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_SlabMasses(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto c = make_cascade(2, "lognormal(sigma2=0.5)");
  const std::array<int, 3> ks{2, 4, 6};
  for (auto _ : state) benchmark::DoNotOptimize(kpzc::slab_masses(c, 1, ks, n));
}
BENCHMARK(BM_SlabMasses)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
