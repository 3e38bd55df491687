// Serial reference vs parallel kernels, and the two enumeration backends.

#include <benchmark/benchmark.h>

#include "ias/kernels.hpp"
#include "ias/oracle.hpp"
#include "ias/random_graphs.hpp"
#include "ias/scm.hpp"

namespace {

ias::Dataset make_data(int d, std::size_t n) {
  ias::GraphSamplerConfig g;
  g.d = d;
  g.n_interventions = ias::InterventionCount::fixed(1);
  ias::Rng rng(7);
  const ias::LinearScm scm = ias::sample_scm(ias::sample_dag(g, rng), 1.0, rng);
  return ias::simulate(scm, n, rng);
}

void BM_MomentsSerial(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ias::env_moments_serial(data));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_MomentsParallel(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ias::env_moments_parallel(data));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

std::vector<ias::Dag> dense_graphs(int d, int count) {
  ias::GraphSamplerConfig g;
  g.d = d;
  g.density = ias::Density::dense();
  g.n_interventions = ias::InterventionCount::uniform(1, d);
  ias::Rng rng(11);
  std::vector<ias::Dag> graphs;
  for (int i = 0; i < count; ++i) graphs.push_back(ias::sample_dag(g, rng));
  return graphs;
}

void enumerate_with(benchmark::State& state, ias::EnumerationBackend backend, ias::ExecutionPolicy policy) {
  const auto graphs = dense_graphs(static_cast<int>(state.range(0)), 8);
  ias::EnumerationOptions opts;
  opts.backend = backend;
  opts.policy = policy;
  opts.budget = ~std::uint64_t{0};
  for (auto _ : state) {
    for (const auto& dag : graphs) benchmark::DoNotOptimize(ias::enumerate_minimally_invariant(dag, opts));
  }
}

void BM_BruteForceSerial(benchmark::State& state) {
  enumerate_with(state, ias::EnumerationBackend::BruteForce, ias::ExecutionPolicy::Serial);
}
void BM_BruteForceParallel(benchmark::State& state) {
  enumerate_with(state, ias::EnumerationBackend::BruteForce, ias::ExecutionPolicy::Parallel);
}
void BM_Separators(benchmark::State& state) {
  enumerate_with(state, ias::EnumerationBackend::Separators, ias::ExecutionPolicy::Serial);
}

}  // namespace

BENCHMARK(BM_MomentsSerial)->Args({6, 100000})->Args({100, 10000});
BENCHMARK(BM_MomentsParallel)->Args({6, 100000})->Args({100, 10000});
BENCHMARK(BM_BruteForceSerial)->Arg(10)->Arg(13);
BENCHMARK(BM_BruteForceParallel)->Arg(10)->Arg(13);
BENCHMARK(BM_Separators)->Arg(10)->Arg(13);

BENCHMARK_MAIN();
