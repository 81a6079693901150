#include <benchmark/benchmark.h>

#include "geneaperc/branching.hpp"
#include "geneaperc/coloring.hpp"
#include "geneaperc/mc.hpp"
#include "geneaperc/oracle.hpp"
#include "geneaperc/percolation.hpp"

using namespace geneaperc;

namespace {

Tree fig1_tree(std::uint32_t depth, Seed seed) {
  GrowthBudget budget;
  budget.max_generation = depth;
  return sample_bgw_tree(OffspringLaw::uniform(1, 3), budget, seed).tree;
}

void BM_SampleBgwTree(benchmark::State& state) {
  GrowthBudget budget;
  budget.max_generation = static_cast<std::uint32_t>(state.range(0));
  const auto law = OffspringLaw::uniform(1, 3);
  Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_bgw_tree(law, budget, seed++).tree.size());
}
BENCHMARK(BM_SampleBgwTree)->Arg(8)->Arg(12)->Arg(16);

void BM_PercolateAndCluster(benchmark::State& state) {
  const Tree t = fig1_tree(static_cast<std::uint32_t>(state.range(0)), 3);
  Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(clusters(t, percolate(t, 0.5, seed++)).cluster_count());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_PercolateAndCluster)->Arg(8)->Arg(12);

void BM_DacColor(benchmark::State& state) {
  const Tree t = fig1_tree(12, 5);
  const auto colors = ColorDistribution::uniform(3);
  Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(dac_color(t, 0.3, colors, seed++).coloring.distinct());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_DacColor);

void BM_MutationColor(benchmark::State& state) {
  const Tree t = fig1_tree(12, 5);
  const Model model = state.range(0) ? Model::mim : Model::mdm;
  Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mutation_color(t, model, 0.3, 3, 1, seed++).coloring.distinct());
}
BENCHMARK(BM_MutationColor)->Arg(0)->Arg(1);

void BM_RunReplicate(benchmark::State& state) {
  ExperimentPlan plan;
  plan.model = static_cast<Model>(state.range(0));
  plan.d = 3;
  plan.depth = 50;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replicate(plan, i++).threshold);
}
BENCHMARK(BM_RunReplicate)
    ->Arg(static_cast<int>(Model::bernoulli))
    ->Arg(static_cast<int>(Model::dac))
    ->Arg(static_cast<int>(Model::restricted_dac));

void BM_ExactPartitionLaw(benchmark::State& state) {
  const Tree t = complete_tree(2, static_cast<std::uint32_t>(state.range(0)));
  ColoringLawParams params;
  params.p = Rational(1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_coloring_law(t, Model::bernoulli, params, Observable::partition).support_size());
  }
}
BENCHMARK(BM_ExactPartitionLaw)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExactDacLaw(benchmark::State& state) {
  const Tree t = complete_tree(2, 2);
  ColoringLawParams params;
  params.p = Rational(1, 3);
  params.d = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_coloring_law(t, Model::dac, params, Observable::full).support_size());
  }
}
BENCHMARK(BM_ExactDacLaw)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExtinctionProbability(benchmark::State& state) {
  const auto law = OffspringLaw::binomial(2, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(extinction_probability(law));
}
BENCHMARK(BM_ExtinctionProbability);

}  // namespace

BENCHMARK_MAIN();
