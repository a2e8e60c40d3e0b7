#include <benchmark/benchmark.h>

#include <random>

#include "gedfem/material.hpp"
#include "gedfem/selfcheck.hpp"

using namespace gedfem;

static void BM_pk1_closed_form(benchmark::State& state) {
  std::mt19937 rng(1);
  const MaterialModel m{random_closed_form(rng)};
  const RandomState s = random_admissible_state(rng);
  for (auto _ : state) {
    Tensor2d p = pk1_stress(s.f, s.phi, s.grad_phi, s.kappa, m);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_pk1_closed_form);

static void BM_pk1_data_driven(benchmark::State& state) {
  std::mt19937 rng(2);
  const MaterialModel m{random_data_driven(rng)};
  const RandomState s = random_admissible_state(rng);
  for (auto _ : state) {
    Tensor2d p = pk1_stress(s.f, s.phi, s.grad_phi, s.kappa, m);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_pk1_data_driven);

static void BM_internal_energy_value(benchmark::State& state) {
  std::mt19937 rng(3);
  const MaterialModel m{random_closed_form(rng)};
  const RandomState s = random_admissible_state(rng);
  for (auto _ : state) {
    double e = internal_energy(s.f, s.phi, s.grad_phi, s.kappa, m);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_internal_energy_value);
