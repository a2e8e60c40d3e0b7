#include <benchmark/benchmark.h>

#include "gedfem/kernel.hpp"
#include "gedfem/solver.hpp"

using namespace gedfem;

namespace {

struct KernelFixture {
  std::array<std::array<double, 3>, 8> coords;
  std::array<double, 24> u{};
  std::array<double, 8> phi{};
  std::array<double, 8> kappa{};
  MaterialModel material{ClosedFormParams::from_youngs(210.0, 0.3, 0.002, 0.1, 1.0, 1000.0)};

  KernelFixture() {
    const Mesh m = box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
    for (int a = 0; a < 8; ++a) coords[a] = m.nodes[m.elements[0][a]];
    for (int a = 0; a < 8; ++a) {
      u[3 * a] = 0.15 * coords[a][0];
      phi[a] = 0.4;
    }
    kappa.fill(0.3);
  }
};

}  // namespace

static void BM_element_residual(benchmark::State& state) {
  KernelFixture fx;
  KernelControls ctl;
  ctl.scheme = Scheme::staggered;
  for (auto _ : state) {
    auto r = element_kernel<double>(fx.coords, fx.u, fx.phi, fx.kappa, fx.material,
                                    Coupling::nonlocal, ctl);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_element_residual);

static void BM_element_tangent(benchmark::State& state) {
  KernelFixture fx;
  KernelControls ctl;
  ctl.scheme = Scheme::staggered;
  for (auto _ : state) {
    auto sys = element_system(fx.coords, fx.u, fx.phi, fx.kappa, fx.material,
                              Coupling::nonlocal, ctl);
    benchmark::DoNotOptimize(sys);
  }
}
BENCHMARK(BM_element_tangent);

static void BM_element_tangent_monolithic(benchmark::State& state) {
  KernelFixture fx;
  KernelControls ctl;
  ctl.scheme = Scheme::monolithic;
  for (auto _ : state) {
    auto sys = element_system(fx.coords, fx.u, fx.phi, fx.kappa, fx.material,
                              Coupling::nonlocal, ctl);
    benchmark::DoNotOptimize(sys);
  }
}
BENCHMARK(BM_element_tangent_monolithic);

static void BM_plate_assembly(benchmark::State& state) {
  Problem p;
  p.mesh = box_mesh(10.0, 10.0, 1.0, 8, 8, 1);
  p.material = MaterialModel(ClosedFormParams::from_youngs(210.0, 0.3, 0.002, 0.1, 1.0, 1000.0));
  const DofMap dofs = DofMap::for_mesh(p.mesh);
  SystemState s = SystemState::zero(p.mesh);
  for (int n = 0; n < p.mesh.node_count(); ++n) s.u[3 * std::size_t(n)] = 0.05 * p.mesh.nodes[n][0];
  SolverConfig cfg;
  cfg.scheme = Scheme::staggered;
  for (auto _ : state) {
    auto out = assemble(p, dofs, s, 0.0, {}, cfg.scheme, cfg, true);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_plate_assembly);
