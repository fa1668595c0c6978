#include <benchmark/benchmark.h>

#include "phivar/dyadic.hpp"

using namespace phivar;

namespace {

void BM_EnumerateIncrements(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = CoefficientScheme::prescribed_q(0.7, RegularlyVaryingFn::shifted_power(2.0));
  const auto signs = state.range(1) ? SignField::random(42) : SignField::classic();
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_increments(s, signs, n).telescoped_sum);
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_EnumerateIncrements)->Args({16, 0})->Args({16, 1})->Args({20, 0})->Args({20, 1})
    ->Unit(benchmark::kMillisecond);

void BM_GenPath(benchmark::State& state) {
  const auto s = CoefficientScheme::takagi();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_path(s, SignField::classic(), static_cast<std::size_t>(state.range(0))).values.data());
  }
}
BENCHMARK(BM_GenPath)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EvalF(benchmark::State& state) {
  const SeriesEvaluator f(CoefficientScheme::geometric(0.6), SignField::random(1), 1e-12);
  double t = 0.123;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(t));
    t = t < 0.9 ? t + 1e-3 : 0.123;
  }
}
BENCHMARK(BM_EvalF);

}  // namespace
