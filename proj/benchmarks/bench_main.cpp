#include <benchmark/benchmark.h>

#include "crteffects/datagen_causal.hpp"
#include "crteffects/datagen_margins.hpp"
#include "crteffects/estimators.hpp"
#include "crteffects/mc_harness.hpp"
#include "crteffects/randomization.hpp"

using namespace crteffects;

namespace {

GenerativeConfig bench_world_config(int n_clusters, double size_mean) {
  GenerativeConfig c;
  c.n_clusters = n_clusters;
  c.size_mean = size_mean;
  c.size_dispersion = size_mean / 6.0;
  c.baseline_risk = 0.05;
  c.risk_heterogeneity = 0.5;
  c.participation_intercept = 0.4;
  c.confounding_strength = 0.4;
  c.direct_efficacy = 0.5;
  c.spillover_strength = 0.6;
  c.seed = 1;
  return c;
}

void BM_GenerateWorld(benchmark::State& state) {
  GenerativeConfig config =
      bench_world_config(static_cast<int>(state.range(0)), 200.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_world(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateWorld)->Arg(20)->Arg(80)->Arg(320);

void BM_EstimateAllEffects(benchmark::State& state) {
  GenerativeConfig config =
      bench_world_config(static_cast<int>(state.range(0)), 400.0);
  PotentialWorld world = generate_world(config);
  Assignment assignment =
      assign(cluster_keys(world),
             RandomizationScheme{CompletelyRandomized{static_cast<int>(state.range(0) / 2)}, 3});
  TrialDataset dataset = observe(world, assignment);
  for (auto _ : state) {
    for (EffectKind kind :
         {EffectKind::overall, EffectKind::indirect, EffectKind::total,
          EffectKind::naive_direct, EffectKind::control_arm_contrast}) {
      benchmark::DoNotOptimize(estimate(dataset, kind));
    }
  }
}
BENCHMARK(BM_EstimateAllEffects)->Arg(40)->Arg(160);

void BM_McReplicates(benchmark::State& state) {
  PotentialWorld world = generate_world(bench_world_config(60, 150.0));
  RandomizationScheme scheme{CompletelyRandomized{30}, 0};
  MCOptions options;
  options.n_replicates = 500;
  options.seed = 7;
  options.n_threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_mc(world, scheme, options));
  }
  state.SetItemsProcessed(state.iterations() * options.n_replicates);
}
BENCHMARK(BM_McReplicates)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SynthesizeMargins(benchmark::State& state) {
  MarginSpec spec;
  spec.vaccine =
      ArmMargins{40, 777.0, 136.0, 472.0, 103.0, 18869, 12206, 34, 16};
  spec.control =
      ArmMargins{40, 792.0, 142.0, 470.0, 104.0, 18804, 12877, 96, 31};
  spec.event_concentration = 600.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize(spec, ++seed));
  }
}
BENCHMARK(BM_SynthesizeMargins)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
