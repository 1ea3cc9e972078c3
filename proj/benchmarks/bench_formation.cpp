#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "formation/dynamics.hpp"
#include "formation/partition.hpp"
#include "formation/spectral.hpp"

using namespace formation;

namespace {

TriangulatedLamanGraph strip(int n) {
  std::vector<HennebergStep> steps;
  for (int v = 3; v <= n; ++v) steps.push_back({v, {v - 2, v - 1}});
  return TriangulatedLamanGraph::build_from_henneberg(n, steps);
}

FormationSystem unit_system(int n) {
  auto g = strip(n);
  const std::vector<double> targets(g.edges().size(), 1.0);
  return build_system(std::move(g), targets);
}

Configuration sample(const FormationSystem& sys, std::uint64_t seed) {
  auto rng = trial_generator(seed, 0);
  return sample_admissible_configuration(sys, rng, 3.0);
}

void BM_gradient(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  const auto p = sample(sys, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(sys, p));
}
BENCHMARK(BM_gradient)->Arg(4)->Arg(8)->Arg(16);

void BM_hessian(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  const auto p = sample(sys, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hessian(sys, p));
}
BENCHMARK(BM_hessian)->Arg(4)->Arg(8)->Arg(16);

void BM_signature(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  const auto H = hessian(sys, sample(sys, 3));
  for (auto _ : state) benchmark::DoNotOptimize(signature_of(H));
}
BENCHMARK(BM_signature)->Arg(8)->Arg(16);

void BM_independent_partition(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  const auto p = sample(sys, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(independent_partition(sys.graph, p));
}
BENCHMARK(BM_independent_partition)->Arg(6)->Arg(10);

void BM_enumerate_target_orbits(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_target_orbits(sys));
}
BENCHMARK(BM_enumerate_target_orbits)->Arg(6)->Arg(10);

void BM_find_equilibrium(benchmark::State& state) {
  const auto sys = unit_system(static_cast<int>(state.range(0)));
  const auto p0 = sample(sys, 5);
  for (auto _ : state) benchmark::DoNotOptimize(find_equilibrium(sys, p0));
}
BENCHMARK(BM_find_equilibrium)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
