#include <benchmark/benchmark.h>

#include "scottlab/radial_operator.hpp"
#include "scottlab/spectrum.hpp"

namespace {

using namespace scottlab;

void BM_CentrifugalDecomposition(benchmark::State& state) {
  const RadialGrid grid(0.1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decompose_centrifugal(grid, 1));
}
BENCHMARK(BM_CentrifugalDecomposition)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BuildKinetic(benchmark::State& state) {
  const RadialGrid grid(0.1, static_cast<std::size_t>(state.range(0)));
  const auto d = decompose_centrifugal(grid, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_kinetic(d.spectrum, KineticSymbol::chandrasekhar()));
  }
}
BENCHMARK(BM_BuildKinetic)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BoundStates(benchmark::State& state) {
  const RadialGrid grid(0.1, static_cast<std::size_t>(state.range(0)));
  ChannelSpec spec;
  spec.gamma = 0.5;
  const auto op = assemble_channel_operator(spec, grid, KineticSymbol::chandrasekhar());
  for (auto _ : state) benchmark::DoNotOptimize(bound_states(op, 5));
}
BENCHMARK(BM_BoundStates)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BoundStatesSchroedinger(benchmark::State& state) {
  const RadialGrid grid(0.05, static_cast<std::size_t>(state.range(0)));
  ChannelSpec spec;
  spec.gamma = 0.5;
  const auto op = assemble_channel_operator(spec, grid, KineticSymbol::schroedinger());
  for (auto _ : state) benchmark::DoNotOptimize(bound_states(op, 5));
}
BENCHMARK(BM_BoundStatesSchroedinger)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
