// Gather kernels (serial and threaded) against the scatter reference, plus
// one full assembly-and-solve step for scale.
#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "macflow/operators.hpp"
#include "macflow/reference.hpp"
#include "macflow/solver.hpp"

using namespace macflow;

namespace {

struct Fixture {
  MacMesh mesh;
  CellScalarField rho;
  VelocityField u;
  ViscosityTensorField mu;
  MassFluxSet fluxes;

  explicit Fixture(int n) : mesh(unit_square_mesh(n, n, 2.0)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    rho = CellScalarField::zeros(mesh);
    for (auto& v : rho.values) v = 2.0 + d(rng);
    u = VelocityField::zeros(mesh);
    for (int i = 0; i < 2; ++i) {
      for (auto& v : u.comp[i]) v = d(rng);
    }
    u.apply_dirichlet(mesh);
    mu = viscosity_tensor(mesh, rho, [](double r) { return 0.01 + 0.01 * r; });
    fluxes = mass_fluxes(mesh, rho, u);
  }
};

const Fixture& fixture(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Fixture(n)).first;
  return it->second;
}

// state.range(1): 0 = scatter reference, otherwise gather with that many threads.
void BM_Divergence(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threads == 0 ? reference::divergence(f.mesh, f.u) : divergence(f.mesh, f.u, {threads}));
  }
}

void BM_Diffusion(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threads == 0 ? reference::diffusion_apply(f.mesh, f.mu, f.u)
                                          : diffusion_apply(f.mesh, f.mu, f.u, {threads}));
  }
}

void BM_MassFluxes(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threads == 0 ? reference::mass_fluxes(f.mesh, f.rho, f.u)
                                          : mass_fluxes(f.mesh, f.rho, f.u, {threads}));
  }
}

void BM_Convection(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        threads == 0 ? reference::convection_apply(f.mesh, f.fluxes, f.u, AdvectionScheme::kCentered)
                     : convection_apply(f.mesh, f.fluxes, f.u, AdvectionScheme::kCentered, {threads}));
  }
}

void BM_TimeStep(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.threads = static_cast<int>(state.range(1));
  StepSolver solver(f.mesh, cfg);
  const TimeState s0 = TimeState::initial(f.mesh, f.rho, VelocityField::zeros(f.mesh));
  Forcing forcing;
  forcing.gravity = {0.0, -1.0, 0.0};
  const ViscosityLaw law = [](double r) { return 0.01 + 0.01 * r; };
  for (auto _ : state) benchmark::DoNotOptimize(solver.advance(s0, forcing, law));
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int n : {64, 256}) {
    for (int t : {0, 1, 2, 4}) b->Args({n, t});
  }
  b->ArgNames({"n", "threads"});
}

}  // namespace

BENCHMARK(BM_Divergence)->Apply(kernel_args);
BENCHMARK(BM_Diffusion)->Apply(kernel_args);
BENCHMARK(BM_MassFluxes)->Apply(kernel_args);
BENCHMARK(BM_Convection)->Apply(kernel_args);
BENCHMARK(BM_TimeStep)->Args({32, 1})->Args({64, 1})->Args({64, 2})->ArgNames({"n", "threads"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
