#include <doctest.h>

#include <cmath>

#include "crteffects/datagen_causal.hpp"
#include "crteffects/errors.hpp"
#include "crteffects/mc_harness.hpp"
#include "crteffects/report_io.hpp"
#include "support/builders.hpp"

using namespace crteffects;

namespace {

GenerativeConfig small_world_config() {
  GenerativeConfig config;
  config.n_clusters = 24;
  config.size_mean = 60.0;
  config.size_dispersion = 10.0;
  config.baseline_risk = 0.08;
  config.risk_heterogeneity = 0.4;
  config.participation_intercept = 0.3;
  config.confounding_strength = 0.4;
  config.direct_efficacy = 0.5;
  config.spillover_strength = 0.6;
  config.seed = 7;
  return config;
}

const MCEffectRow& row_of(const MCReport& report, EffectKind kind) {
  for (const MCEffectRow& row : report.rows) {
    if (row.kind == kind) return row;
  }
  REQUIRE(false);
  return report.rows.front();
}

}  // namespace

TEST_CASE("same seed gives an identical report; different seed does not") {
  PotentialWorld world = generate_world(small_world_config());
  RandomizationScheme scheme{CompletelyRandomized{12}, 0};
  MCOptions options;
  options.n_replicates = 200;
  options.seed = 11;

  MCReport a = run_mc(world, scheme, options);
  MCReport b = run_mc(world, scheme, options);
  CHECK(to_json(a, Scale::raw) == to_json(b, Scale::raw));

  options.seed = 12;
  CHECK(to_json(run_mc(world, scheme, options), Scale::raw) !=
        to_json(a, Scale::raw));
}

TEST_CASE("extending the replicate count preserves earlier replicates") {
  PotentialWorld world = generate_world(small_world_config());
  RandomizationScheme scheme{CompletelyRandomized{12}, 0};
  MCOptions options;
  options.n_replicates = 60;
  options.seed = 3;
  options.keep_replicates = true;

  MCReport short_run = run_mc(world, scheme, options);
  options.n_replicates = 120;
  MCReport long_run = run_mc(world, scheme, options);
  for (std::size_t k = 0; k < short_run.replicate_estimates.size(); ++k) {
    for (int r = 0; r < 60; ++r) {
      CHECK(short_run.replicate_estimates[k][r] ==
            long_run.replicate_estimates[k][r]);
    }
  }
}

TEST_CASE("parallel execution reproduces the serial report exactly") {
  PotentialWorld world = generate_world(small_world_config());
  RandomizationScheme scheme{CompletelyRandomized{12}, 0};
  MCOptions serial;
  serial.n_replicates = 300;
  serial.seed = 5;
  MCOptions parallel = serial;
  parallel.n_threads = 4;
  CHECK(to_json(run_mc(world, scheme, serial), Scale::raw) ==
        to_json(run_mc(world, scheme, parallel), Scale::raw));
}

TEST_CASE("null world: bias within three MC standard errors of zero") {
  GenerativeConfig config = small_world_config();
  config.direct_efficacy = 0.0;
  config.spillover_strength = 0.0;
  PotentialWorld world = generate_world(config);
  RandomizationScheme scheme{CompletelyRandomized{12}, 0};
  MCOptions options;
  options.n_replicates = 2000;
  options.seed = 21;
  MCReport report = run_mc(world, scheme, options);
  for (EffectKind kind :
       {EffectKind::overall, EffectKind::indirect, EffectKind::total}) {
    const MCEffectRow& row = row_of(report, kind);
    REQUIRE(row.true_value.has_value());
    CHECK(*row.true_value == 0.0);
    CHECK(std::abs(row.bias) < 3.0 * row.mc_standard_error);
    CHECK(row.n_failed == 0);
  }
}

TEST_CASE("replicates hitting estimation errors are counted, not fatal") {
  // one all-participator cluster: 'indirect' is undefined under the error
  // policy whenever that cluster is in the dataset (it always is); six
  // clusters leave two per arm even after a drop, so the drop policy keeps
  // the SE computable.
  PotentialWorld world;
  world.clusters.push_back(
      builders::world_cluster("a", {1, 1, 1}, {0, 1, 0}, {1, 1, 0}));
  world.clusters.push_back(
      builders::world_cluster("b", {1, 0, 0}, {0, 0, 1}, {1, 0, 1}));
  world.clusters.push_back(
      builders::world_cluster("c", {1, 0, 1}, {0, 0, 1}, {0, 1, 1}));
  world.clusters.push_back(
      builders::world_cluster("d", {0, 1, 0}, {1, 0, 0}, {1, 1, 0}));
  world.clusters.push_back(
      builders::world_cluster("e", {1, 0, 1}, {0, 1, 0}, {0, 1, 1}));
  world.clusters.push_back(
      builders::world_cluster("f", {0, 1, 1}, {1, 0, 1}, {1, 0, 0}));

  RandomizationScheme scheme{CompletelyRandomized{3}, 0};
  MCOptions options;
  options.n_replicates = 50;
  options.seed = 9;
  options.policy = EmptyPolicy::error;
  MCReport report = run_mc(world, scheme, options);

  const MCEffectRow& indirect = row_of(report, EffectKind::indirect);
  CHECK(indirect.n_failed == 50);  // cluster "a" always lacks the stratum
  CHECK(indirect.n_used == 0);
  // overall never needs strata
  CHECK(row_of(report, EffectKind::overall).n_failed == 0);

  // under the drop policy the replicates succeed instead
  options.policy = EmptyPolicy::drop;
  MCReport dropped = run_mc(world, scheme, options);
  CHECK(row_of(dropped, EffectKind::indirect).n_failed == 0);
  CHECK(row_of(dropped, EffectKind::indirect).n_used == 50);
}

TEST_CASE("naive truth row is the selection-bias limit, not a causal zero") {
  GenerativeConfig config = small_world_config();
  config.n_clusters = 60;
  config.size_mean = 120.0;
  config.baseline_risk = 0.02;  // frailty tails must stay below risk 1
  config.direct_efficacy = 0.0;
  config.spillover_strength = 0.0;
  config.confounding_strength = 0.9;
  config.risk_heterogeneity = 0.8;
  PotentialWorld world = generate_world(config);
  TrueEstimands truths = true_estimands(world);
  REQUIRE(truths.naive_limit.has_value());
  CHECK(*truths.naive_limit > 0.0);

  RandomizationScheme scheme{CompletelyRandomized{30}, 0};
  MCOptions options;
  options.n_replicates = 3000;
  options.seed = 13;
  MCReport report = run_mc(world, scheme, options);
  const MCEffectRow& naive = row_of(report, EffectKind::naive_direct);
  CHECK(*naive.true_value == *truths.naive_limit);
  CHECK(std::abs(naive.bias) < 3.0 * naive.mc_standard_error);
  CHECK(*row_of(report, EffectKind::total).true_value == 0.0);
}

TEST_CASE("stratified schemes work end to end") {
  GenerativeConfig config = small_world_config();
  config.n_strata = 2;
  PotentialWorld world = generate_world(config);
  StratifiedBlocked blocked{{{"s0", 6}, {"s1", 6}}};
  RandomizationScheme scheme{blocked, 0};
  MCOptions options;
  options.n_replicates = 200;
  options.seed = 31;
  MCReport report = run_mc(world, scheme, options);
  CHECK(row_of(report, EffectKind::overall).n_used == 200);
}

TEST_CASE("regenerated-world mode is deterministic and labels truth") {
  GenerativeConfig config = small_world_config();
  config.n_clusters = 12;
  config.size_mean = 40.0;
  RandomizationScheme scheme{CompletelyRandomized{6}, 0};
  MCOptions options;
  options.n_replicates = 100;
  options.seed = 17;
  MCReport a = run_mc_regenerated(config, scheme, options);
  MCReport b = run_mc_regenerated(config, scheme, options);
  CHECK(to_json(a, Scale::raw) == to_json(b, Scale::raw));
  CHECK(row_of(a, EffectKind::overall).true_value.has_value());
}

TEST_CASE("replicate count below two is rejected") {
  PotentialWorld world = generate_world(small_world_config());
  RandomizationScheme scheme{CompletelyRandomized{12}, 0};
  MCOptions options;
  options.n_replicates = 1;
  CHECK_THROWS_AS(run_mc(world, scheme, options), Error);
}
