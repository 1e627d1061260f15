#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "frontforge/nonlocal_operator.hpp"

using namespace frontforge;

namespace {

std::vector<double> random_values(int n) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

static void BM_ApplyDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DiscreteOperator op(Measure::fractional(0.75), Grid(n / 20.0, n + 1));
  const std::vector<double> u = random_values(n + 1);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    op.apply(u.data(), 1.0, 0.0, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ApplyDirect)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_ApplyFft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DiscreteOperator op(Measure::fractional(0.75), Grid(n / 20.0, n + 1));
  const FftApply fft(op);
  const std::vector<double> u = random_values(n + 1);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    fft(u.data(), 1.0, 0.0, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ApplyFft)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

// Short-reach kernel: the direct sum touches only a few neighbours.
static void BM_ApplyUniformShortReach(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DiscreteOperator op(Measure::uniform(1.0), Grid(n / 20.0, n + 1));
  const std::vector<double> u = random_values(n + 1);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    op.apply(u.data(), 1.0, 0.0, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ApplyUniformShortReach)->RangeMultiplier(4)->Range(256, 65536);

static void BM_Assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Measure m = Measure::fractional(0.75);
  const Grid g(40.0, n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(DiscreteOperator(m, g).weights().data());
}
BENCHMARK(BM_Assemble)->Arg(800)->Arg(1600)->Arg(3200)->Unit(benchmark::kMillisecond);
