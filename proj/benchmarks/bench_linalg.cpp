#include <benchmark/benchmark.h>

#include <random>

#include "scottlab/dense_linalg.hpp"

namespace {

scottlab::linalg::SymmetricMatrix random_symmetric(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  scottlab::linalg::SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) a.set(i, j, g(rng));
  }
  return a;
}

void BM_EighFull(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scottlab::linalg::eigh(a));
}
BENCHMARK(BM_EighFull)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_EighLowest(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scottlab::linalg::eigh_lowest(a, 20));
}
BENCHMARK(BM_EighLowest)->Arg(800)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GeneralizedMax(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto a = random_symmetric(n);
  auto b = scottlab::linalg::SymmetricMatrix::identity(n);
  b.add_scaled(random_symmetric(n), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(scottlab::linalg::generalized_max_eigenvalue(a, b));
}
BENCHMARK(BM_GeneralizedMax)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
