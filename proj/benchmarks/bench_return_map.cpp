#include <benchmark/benchmark.h>

#include <random>

#include "gedfem/return_map.hpp"
#include "gedfem/selfcheck.hpp"

using namespace gedfem;

static void BM_return_map_closed_form(benchmark::State& state) {
  std::mt19937 rng(4);
  const MaterialModel m{random_closed_form(rng)};
  RandomState s = random_admissible_state(rng);
  s.phi = s.kappa + 0.3;  // force a plastic solve
  for (auto _ : state) {
    ReturnMapResult r = return_map(s.f, s.phi, s.grad_phi, s.kappa, m);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_return_map_closed_form);

static void BM_return_map_data_driven(benchmark::State& state) {
  std::mt19937 rng(5);
  const MaterialModel m{random_data_driven(rng)};
  RandomState s = random_admissible_state(rng);
  s.phi = s.kappa + 0.3;
  for (auto _ : state) {
    ReturnMapResult r = return_map(s.f, s.phi, s.grad_phi, s.kappa, m);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_return_map_data_driven);
