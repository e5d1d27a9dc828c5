#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mlexist/families.hpp"
#include "mlexist/mle.hpp"
#include "mlexist/montecarlo.hpp"
#include "mlexist/uniqueness.hpp"

namespace {

using namespace mlexist;

IndexSet random_support(std::size_t states, std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> xs(draws);
  for (auto& x : xs) x = gen() % states;
  return IndexSet::from_unsorted(xs);
}

void BM_ClosureWalsh(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CubeFamily w = walsh_span(k, 2);
  const IndexSet u = random_support(w.space.size(), w.space.size() / 2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(closure(w.span, u));
}
BENCHMARK(BM_ClosureWalsh)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

void BM_FitWalsh(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CubeFamily w = walsh_span(k, 2);
  std::mt19937_64 gen(11);
  std::vector<std::size_t> xs(4 * w.space.size());
  for (auto& x : xs) x = gen() % w.space.size();
  const Sample sample(w.space, xs);
  for (auto _ : state) benchmark::DoNotOptimize(fit(w.space, w.span, sample));
}
BENCHMARK(BM_FitWalsh)->DenseRange(3, 7)->Unit(benchmark::kMillisecond);

void BM_ExistenceRademacher(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.family = FamilySpec::rademacher(static_cast<std::size_t>(state.range(0)));
  cfg.n = 10;
  cfg.replicates = 10000;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_existence_probability(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.replicates));
}
BENCHMARK(BM_ExistenceRademacher)->Arg(10)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_NuMeanFull(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.family = FamilySpec::full(static_cast<std::size_t>(state.range(0)));
  cfg.estimator = Estimator::NuMean;
  cfg.replicates = 1000;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_nu_uniq(cfg));
}
BENCHMARK(BM_NuMeanFull)->Arg(50)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GraphExistence(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.family = FamilySpec::graph(static_cast<std::size_t>(state.range(0)));
  cfg.n = 12;
  cfg.replicates = 1000;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_existence_probability(cfg));
}
BENCHMARK(BM_GraphExistence)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
