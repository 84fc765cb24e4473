#include <benchmark/benchmark.h>

#include "tmsq/analysis.hpp"
#include "tmsq/collision.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/gaussian.hpp"
#include "tmsq/protocol.hpp"

using namespace tmsq;

static void BM_SqueezedLadder(benchmark::State& state) {
  const SpaceDescriptor f = SpaceDescriptor::field(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(squeezed_ladder_operator(f, 0.5, 1));
}
BENCHMARK(BM_SqueezedLadder)->Arg(10)->Arg(15)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_LindbladStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpaceDescriptor f = SpaceDescriptor::field(n, n);
  const DensityMatrix rho = DensityMatrix::pure(field_basis_state(f, 0, 0));
  const std::vector<Jump> jumps{{annihilation_op(f, 1), 1.0}};
  const Probe none{{}, [](const DensityMatrix&) { return std::vector<double>{}; }};
  LindbladOptions opt;
  opt.samples = 2;
  opt.keep_final_state = false;
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_evolve(rho, jumps, 0.01, 0.01, none, opt));
}
BENCHMARK(BM_LindbladStep)->Arg(8)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_CollisionMap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhysicalParams p = reference_params(0.5);
  const ProtocolStep step = make_step(p, 1.0);
  const SpaceDescriptor f = SpaceDescriptor::field(n, n);
  const CollisionMap phi(collision_hamiltonian(step, f, false, nullptr), step.atom_state, p.tau);
  const Matrix rho = DensityMatrix::pure(field_basis_state(f, 0, 0)).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(phi.apply(rho));
}
BENCHMARK(BM_CollisionMap)->Arg(8)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_GaussianPropagator(benchmark::State& state) {
  const GaussianState v = gaussian_vacuum();
  for (auto _ : state) benchmark::DoNotOptimize(GaussianPropagator(1.9, 36.0, 1, 0.1).apply(v));
}
BENCHMARK(BM_GaussianPropagator);

BENCHMARK_MAIN();
