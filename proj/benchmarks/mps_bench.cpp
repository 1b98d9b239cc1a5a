#include <random>

#include <benchmark/benchmark.h>

#include "ampforge/disentangler.hpp"
#include "ampforge/mps.hpp"

using namespace ampforge;

namespace {

Statevector random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> a(std::size_t{1} << n);
  for (auto& z : a) {
    const double re = g(rng);
    z = Complex(re, g(rng));
  }
  return Statevector(std::move(a)).normalized();
}

void BM_FromStatevector(benchmark::State& state) {
  const Statevector v = random_state(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(from_statevector(v));
}
BENCHMARK(BM_FromStatevector)->DenseRange(6, 14, 2);

void BM_SingleSweep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Mps m = from_statevector(random_state(n, 2));
  DisentangleConfig cfg;
  cfg.k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(m, cfg));
}
BENCHMARK(BM_SingleSweep)->ArgsProduct({{6, 8, 10}, {2, 3}});

void BM_DisentangleToTarget(benchmark::State& state) {
  const Statevector v = random_state(static_cast<std::size_t>(state.range(0)), 3);
  DisentangleConfig cfg;
  cfg.target_fidelity = 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(disentangle_partial(v, cfg));
}
BENCHMARK(BM_DisentangleToTarget)->Arg(5)->Arg(9);

}  // namespace
