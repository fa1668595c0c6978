#include <benchmark/benchmark.h>

#include "phivar/limits.hpp"

using namespace phivar;

namespace {

void BM_MomentExact(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment_Z({0.7, d}, 10.0 / 3.0, EstimateMethod::exact(d)).value);
  }
}
BENCHMARK(BM_MomentExact)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SampleZ(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_Z({0.5, 40}, static_cast<std::uint64_t>(state.range(0)), 3).values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleZ)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CltExact(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(clt_distance(CoefficientScheme::takagi(), static_cast<std::size_t>(state.range(0))).w1);
  }
}
BENCHMARK(BM_CltExact)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_Coupling(benchmark::State& state) {
  const auto s = CoefficientScheme::prescribed_q(0.5, RegularlyVaryingFn::constant(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(coupling_distance(s, 0.5, 30).exact_l2);
}
BENCHMARK(BM_Coupling);

}  // namespace

BENCHMARK_MAIN();
