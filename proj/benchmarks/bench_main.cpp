#include <benchmark/benchmark.h>

#include <random>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/energy.hpp"
#include "simplexflow/minimize.hpp"
#include "simplexflow/parallel.hpp"
#include "simplexflow/transport.hpp"
#include "simplexflow/verify.hpp"

using namespace simplexflow;

namespace {

DiscreteMeasure random_measure(int dim, int atoms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  PointSet p(dim, atoms);
  Vector w(atoms);
  for (int j = 0; j < atoms; ++j) {
    for (int d = 0; d < dim; ++d) p(d, j) = g(rng);
    w[j] = u(rng);
  }
  return DiscreteMeasure(p, w / w.sum());
}

const PowerLawParams kParams = PowerLawParams::finite(10.0, 2.0);

void BM_Energy(benchmark::State& state) {
  set_thread_count(1);
  const auto mu = random_measure(3, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(energy(mu, kParams));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Energy)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_Gradient(benchmark::State& state) {
  set_thread_count(1);
  const auto mu = random_measure(3, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(mu, kParams));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_GradientThreads(benchmark::State& state) {
  set_thread_count(static_cast<int>(state.range(0)));
  const auto mu = random_measure(3, 1024, 3);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(mu, kParams));
  set_thread_count(1);
}
BENCHMARK(BM_GradientThreads)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_WassersteinP(benchmark::State& state) {
  const auto a = random_measure(2, static_cast<int>(state.range(0)), 4);
  const auto b = random_measure(2, static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_p(a, b, 2).distance);
}
BENCHMARK(BM_WassersteinP)->RangeMultiplier(2)->Range(8, 128);

void BM_WassersteinInf(benchmark::State& state) {
  const auto a = random_measure(2, static_cast<int>(state.range(0)), 6);
  const auto b = random_measure(2, static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_inf(a, b).distance);
}
BENCHMARK(BM_WassersteinInf)->RangeMultiplier(2)->Range(8, 128);

void BM_FlowSteps(benchmark::State& state) {
  set_thread_count(1);
  const auto mu = random_measure(2, static_cast<int>(state.range(0)), 8);
  FlowConfig cfg;
  cfg.adapt = false;
  cfg.grad_tol = 0.0;
  cfg.dt_init = 1e-3;
  cfg.t_max = 0.1;  // 100 RK4 steps
  cfg.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(flow(mu, kParams, cfg).energies.back());
}
BENCHMARK(BM_FlowSteps)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_MaxVariance(benchmark::State& state) {
  const auto mu = random_measure(3, static_cast<int>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(max_variance_given_support(mu.points()).value);
}
BENCHMARK(BM_MaxVariance)->RangeMultiplier(4)->Range(8, 128);

void BM_MinimizeTriangle(benchmark::State& state) {
  set_thread_count(1);
  MinimizeConfig cfg;
  cfg.n = 2;
  cfg.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_global(kParams, cfg).energy);
}
BENCHMARK(BM_MinimizeTriangle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
