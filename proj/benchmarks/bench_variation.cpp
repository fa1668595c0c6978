#include <benchmark/benchmark.h>

#include "phivar/variation.hpp"

using namespace phivar;

namespace {

void BM_EnumerateTakagiSquare(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  const auto s = CoefficientScheme::takagi();
  for (auto _ : state) {
    benchmark::DoNotOptimize(variation_enumerate(s, SignField::classic(), PowerGauge{2}, n, 1.0, threads).value);
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_EnumerateTakagiSquare)->Args({20, 1})->Args({24, 1})->Args({24, 4})->Unit(benchmark::kMillisecond);

void BM_EnumeratePhi(benchmark::State& state) {
  const auto s = CoefficientScheme::prescribed_q(0.7, RegularlyVaryingFn::constant(1.0));
  const Gauge g = PhiFunction(0.7, RegularlyVaryingFn::constant(1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(variation_enumerate(s, SignField::classic(), g, 20, 1.0).value);
  }
}
BENCHMARK(BM_EnumeratePhi)->Unit(benchmark::kMillisecond);

void BM_Binomial(benchmark::State& state) {
  const Gauge g = PhiFunction(0.0, RegularlyVaryingFn::power(1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        variation_binomial(CoefficientScheme::takagi(), SignField::classic(), g, static_cast<std::size_t>(state.range(0)))
            .value);
  }
}
BENCHMARK(BM_Binomial)->Arg(1 << 10)->Arg(10000)->Arg(1 << 20)->Unit(benchmark::kMicrosecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto s = CoefficientScheme::prescribed_q(0.7, RegularlyVaryingFn::constant(1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        variation_mc(s, SignField::random(42), PowerGauge{2}, 24, 1.0, static_cast<std::uint64_t>(state.range(0)), 1)
            .value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
