#include <benchmark/benchmark.h>

#include "gedfem/dual.hpp"

using namespace gedfem;

static void BM_dual32_multiply(benchmark::State& state) {
  using S = Dual<double, 32>;
  S a = S::seeded(1.7, 3), b = S::seeded(0.9, 17);
  for (auto _ : state) {
    S c = a * b;
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_dual32_multiply);

static void BM_nested_dual_multiply(benchmark::State& state) {
  using S = Dual<double, 32>;
  using ID = Dual<S, 13>;
  ID a = ID::seeded(S::seeded(1.7, 3), 5), b = ID::seeded(S::seeded(0.9, 17), 11);
  for (auto _ : state) {
    ID c = a * b;
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_nested_dual_multiply);

static void BM_dual_exp(benchmark::State& state) {
  using S = Dual<double, 32>;
  S a = S::seeded(0.3, 7);
  for (auto _ : state) {
    S c = exp(a);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_dual_exp);
