#include <doctest.h>

#include <cmath>
#include <vector>

#include "crteffects/errors.hpp"
#include "crteffects/estimators.hpp"
#include "crteffects/rng.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace crteffects;
using builders::cluster;
using builders::proportion_cluster;

namespace {

// Two treated clusters at 0.2 and 0.4, two control at 0.5 and 0.7.
TrialDataset worked_example() {
  TrialDataset d;
  d.clusters.push_back(proportion_cluster("t1", 1, 1, 5));
  d.clusters.push_back(proportion_cluster("t2", 1, 2, 5));
  d.clusters.push_back(proportion_cluster("c1", 0, 5, 10));
  d.clusters.push_back(proportion_cluster("c2", 0, 7, 10));
  return d;
}

TrialDataset random_dataset(RngStream& rng, int n_per_arm, bool both_strata) {
  TrialDataset d;
  for (int i = 0; i < 2 * n_per_arm; ++i) {
    int m = 4 + static_cast<int>(rng.uniform_below(20));
    ClusterRecord c;
    c.cluster_id = "r" + std::to_string(i);
    c.arm = i < n_per_arm ? 1 : 0;
    for (int j = 0; j < m; ++j) {
      // force at least one of each stratum when requested
      int s = both_strata && j == 0   ? 1
              : both_strata && j == 1 ? 0
                                      : (rng.bernoulli(0.6) ? 1 : 0);
      c.individuals.push_back(
          Individual{static_cast<std::uint8_t>(s),
                     static_cast<std::uint8_t>(rng.bernoulli(0.25) ? 1 : 0)});
    }
    d.clusters.push_back(std::move(c));
  }
  return d;
}

}  // namespace

TEST_CASE("arm mean, hand evaluated") {
  auto d = worked_example();
  ArmMean treated = arm_mean(d, 1, StratumSelector::overall, EmptyPolicy::error);
  CHECK(treated.mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(treated.n_clusters == 2);

  // constant outcomes give the constant back
  TrialDataset constant;
  for (int i = 0; i < 3; ++i) {
    constant.clusters.push_back(proportion_cluster("k" + std::to_string(i), 1, 2, 8));
    constant.clusters.push_back(proportion_cluster("q" + std::to_string(i), 0, 1, 8));
  }
  CHECK(arm_mean(constant, 1, StratumSelector::overall, EmptyPolicy::error).mean ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("risk difference with unpooled SE and Wald CI, hand evaluated") {
  auto d = worked_example();
  EffectEstimate est = estimate_effect(d, EffectKind::overall);
  CHECK(est.point == doctest::Approx(-0.3).epsilon(1e-12));
  // s1^2 = s0^2 = 0.02, SE = sqrt(0.02/2 + 0.02/2) = sqrt(0.02)
  CHECK(*est.standard_error ==
        doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(*est.ci_lower == doctest::Approx(-0.3 - 1.96 * std::sqrt(0.02)).epsilon(1e-12));
  CHECK(*est.ci_upper == doctest::Approx(-0.3 + 1.96 * std::sqrt(0.02)).epsilon(1e-12));
  CHECK(*est.ci_lower == doctest::Approx(-0.5772).epsilon(1e-4));
  CHECK(*est.ci_upper == doctest::Approx(-0.0228).epsilon(2e-3));
  CHECK(est.n_treated_clusters == 2);
  CHECK(est.n_control_clusters == 2);
  CHECK_FALSE(est.non_causal);
}

TEST_CASE("identical arms give the null contrast value") {
  TrialDataset d;
  d.clusters.push_back(proportion_cluster("t1", 1, 1, 4));
  d.clusters.push_back(proportion_cluster("t2", 1, 3, 4));
  d.clusters.push_back(proportion_cluster("c1", 0, 1, 4));
  d.clusters.push_back(proportion_cluster("c2", 0, 3, 4));

  EstimateOptions rd;
  CHECK(estimate_effect(d, EffectKind::overall, rd).point ==
        doctest::Approx(0.0).epsilon(1e-15));

  EstimateOptions rr;
  rr.contrast = Contrast::risk_ratio;
  CHECK(estimate_effect(d, EffectKind::overall, rr).point ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("risk ratio uses the log-scale delta method") {
  auto d = worked_example();
  EstimateOptions options;
  options.contrast = Contrast::risk_ratio;
  EffectEstimate est = estimate_effect(d, EffectKind::overall, options);
  CHECK(est.point == doctest::Approx(0.5).epsilon(1e-12));
  double se_log = std::sqrt(0.02 / (2 * 0.3 * 0.3) + 0.02 / (2 * 0.6 * 0.6));
  CHECK(*est.standard_error == doctest::Approx(se_log).epsilon(1e-12));
  CHECK(*est.ci_lower ==
        doctest::Approx(std::exp(std::log(0.5) - 1.96 * se_log)).epsilon(1e-12));
  CHECK(*est.ci_upper ==
        doctest::Approx(std::exp(std::log(0.5) + 1.96 * se_log)).epsilon(1e-12));
}

TEST_CASE("naive direct estimate, hand evaluated") {
  // one vaccine cluster, S=(1,1,0,0), Y=(1,0,1,0): 0.5 - 0.5 = 0
  TrialDataset d;
  d.clusters.push_back(cluster("v1", 1, {1, 1, 0, 0}, {1, 0, 1, 0}));
  d.clusters.push_back(cluster("c1", 0, {1, 0}, {0, 0}));
  EstimateOptions options;
  options.point_only = true;
  EffectEstimate est = naive_direct_estimate(d, options);
  CHECK(est.point == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(est.non_causal);
  CHECK(est.n_treated_clusters == 1);

  // equal strata proportions in every vaccine cluster -> exactly 0
  TrialDataset equal;
  equal.clusters.push_back(cluster("v1", 1, {1, 1, 0, 0}, {1, 0, 1, 0}));
  equal.clusters.push_back(cluster("v2", 1, {1, 1, 1, 0, 0, 0}, {1, 1, 0, 1, 1, 0}));
  equal.clusters.push_back(cluster("c1", 0, {1, 0}, {0, 0}));
  EffectEstimate z = naive_direct_estimate(equal);
  CHECK(z.point == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(*z.standard_error == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("control-arm stratum contrast, hand evaluated") {
  // participants 2/4 diseased, non-participants 1/4 -> 0.25
  TrialDataset d;
  d.clusters.push_back(cluster("c1", 0, {1, 1, 1, 1, 0, 0, 0, 0},
                               {1, 1, 0, 0, 1, 0, 0, 0}));
  d.clusters.push_back(cluster("v1", 1, {1, 0}, {0, 0}));
  EstimateOptions options;
  options.point_only = true;
  EffectEstimate est = control_arm_stratum_contrast(d, options);
  CHECK(est.point == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(est.non_causal);
  CHECK(est.n_control_clusters == 1);
}

TEST_CASE("paired SE for the within-arm contrast") {
  TrialDataset d;
  // diffs: 0.5 - 0.0 = 0.5 and 0.0 - 0.5 = -0.5 -> mean 0, var 0.5
  d.clusters.push_back(cluster("v1", 1, {1, 1, 0, 0}, {1, 0, 0, 0}));
  d.clusters.push_back(cluster("v2", 1, {1, 1, 0, 0}, {0, 0, 1, 0}));
  d.clusters.push_back(cluster("c1", 0, {1, 0}, {0, 0}));
  EffectEstimate est = naive_direct_estimate(d);
  CHECK(est.point == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(*est.standard_error == doctest::Approx(std::sqrt(0.5 / 2)).epsilon(1e-12));
}

TEST_CASE("empty-policy: error raises, drop records") {
  TrialDataset d;
  d.clusters.push_back(cluster("v1", 1, {1, 1}, {1, 0}));  // no non-participators
  d.clusters.push_back(cluster("v2", 1, {1, 0}, {0, 1}));
  d.clusters.push_back(cluster("c1", 0, {1, 0}, {0, 0}));
  d.clusters.push_back(cluster("c2", 0, {1, 0}, {1, 0}));

  EstimateOptions error_policy;
  CHECK_THROWS_AS(estimate_effect(d, EffectKind::indirect, error_policy), Error);
  try {
    estimate_effect(d, EffectKind::indirect, error_policy);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_outcome);
  }

  EstimateOptions drop;
  drop.policy = EmptyPolicy::drop;
  drop.point_only = true;
  EffectEstimate est = estimate_effect(d, EffectKind::indirect, drop);
  REQUIRE(est.dropped_clusters.size() == 1);
  CHECK(est.dropped_clusters[0] == "v1");
  CHECK(est.n_treated_clusters == 1);
}

TEST_CASE("error taxonomy") {
  TrialDataset one_arm;
  one_arm.clusters.push_back(proportion_cluster("t1", 1, 1, 4));
  CHECK_THROWS_AS(estimate_effect(one_arm, EffectKind::overall), Error);
  try {
    estimate_effect(one_arm, EffectKind::overall);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_arm);
  }

  // all treated clusters lack non-participators
  TrialDataset all_dropped;
  all_dropped.clusters.push_back(cluster("v1", 1, {1, 1}, {0, 0}));
  all_dropped.clusters.push_back(cluster("c1", 0, {1, 0}, {0, 0}));
  all_dropped.clusters.push_back(cluster("c2", 0, {1, 0}, {0, 0}));
  EstimateOptions drop;
  drop.policy = EmptyPolicy::drop;
  try {
    estimate_effect(all_dropped, EffectKind::indirect, drop);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::all_clusters_dropped);
  }

  // one cluster per arm: point fine, SE impossible
  TrialDataset tiny;
  tiny.clusters.push_back(proportion_cluster("t1", 1, 1, 4));
  tiny.clusters.push_back(proportion_cluster("c1", 0, 2, 4));
  EstimateOptions point_only;
  point_only.point_only = true;
  CHECK(estimate_effect(tiny, EffectKind::overall, point_only).point ==
        doctest::Approx(-0.25));
  try {
    estimate_effect(tiny, EffectKind::overall);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_clusters);
  }

  // risk ratio with a zero control mean
  TrialDataset zero_control;
  zero_control.clusters.push_back(proportion_cluster("t1", 1, 1, 4));
  zero_control.clusters.push_back(proportion_cluster("t2", 1, 1, 4));
  zero_control.clusters.push_back(proportion_cluster("c1", 0, 0, 4));
  zero_control.clusters.push_back(proportion_cluster("c2", 0, 0, 4));
  EstimateOptions rr;
  rr.contrast = Contrast::risk_ratio;
  try {
    estimate_effect(zero_control, EffectKind::overall, rr);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_arm_mean);
  }
}

TEST_CASE("estimator equals the least-squares slope of outcome on arm") {
  RngStream rng(314);
  for (int rep = 0; rep < 50; ++rep) {
    TrialDataset d = random_dataset(rng, 3 + static_cast<int>(rng.uniform_below(8)),
                                    true);
    EffectEstimate est = estimate_effect(d, EffectKind::overall);

    std::vector<double> arm, outcome;
    for (const auto& c : d.clusters) {
      arm.push_back(c.arm);
      outcome.push_back(cluster_outcome(c, StratumSelector::overall)->value);
    }
    CHECK(est.point ==
          doctest::Approx(oracles::regression_slope(arm, outcome)).epsilon(1e-10));
  }
}

TEST_CASE("arm relabeling negates differences and inverts ratios") {
  RngStream rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    TrialDataset d = random_dataset(rng, 4, true);
    TrialDataset flipped = d;
    for (auto& c : flipped.clusters) c.arm = 1 - c.arm;

    EffectEstimate rd = estimate_effect(d, EffectKind::overall);
    EffectEstimate rd_flipped = estimate_effect(flipped, EffectKind::overall);
    CHECK(rd.point == doctest::Approx(-rd_flipped.point).epsilon(1e-12));
    CHECK(*rd.standard_error ==
          doctest::Approx(*rd_flipped.standard_error).epsilon(1e-12));

    ArmMean m1 = arm_mean(d, 1, StratumSelector::overall, EmptyPolicy::error);
    ArmMean m0 = arm_mean(d, 0, StratumSelector::overall, EmptyPolicy::error);
    if (m1.mean > 0.0 && m0.mean > 0.0) {
      EstimateOptions rr;
      rr.contrast = Contrast::risk_ratio;
      EffectEstimate a = estimate_effect(d, EffectKind::overall, rr);
      EffectEstimate b = estimate_effect(flipped, EffectKind::overall, rr);
      CHECK(a.point == doctest::Approx(1.0 / b.point).epsilon(1e-12));
    }
  }
}

TEST_CASE("SE invariant to cluster order; CI contains the point") {
  RngStream rng(555);
  TrialDataset d = random_dataset(rng, 8, true);
  EffectEstimate before = estimate_effect(d, EffectKind::overall);
  rng.shuffle(d.clusters);
  EffectEstimate after = estimate_effect(d, EffectKind::overall);
  CHECK(*before.standard_error == doctest::Approx(*after.standard_error).epsilon(1e-14));
  CHECK(before.point == doctest::Approx(after.point).epsilon(1e-14));
  CHECK(*before.ci_lower <= before.point);
  CHECK(before.point <= *before.ci_upper);
}

TEST_CASE("identical cluster outcomes within arms give SE 0 and a point CI") {
  TrialDataset d;
  for (int i = 0; i < 3; ++i) {
    d.clusters.push_back(proportion_cluster("t" + std::to_string(i), 1, 1, 4));
    d.clusters.push_back(proportion_cluster("c" + std::to_string(i), 0, 3, 4));
  }
  EffectEstimate est = estimate_effect(d, EffectKind::overall);
  CHECK(*est.standard_error == 0.0);
  CHECK(*est.ci_lower == est.point);
  CHECK(*est.ci_upper == est.point);
}

TEST_CASE("overall is the participation mixture of total and indirect") {
  // every cluster: size 10, 4 participators -> shared fraction p = 0.4
  RngStream rng(808);
  for (int rep = 0; rep < 30; ++rep) {
    TrialDataset d;
    for (int i = 0; i < 8; ++i) {
      ClusterRecord c;
      c.cluster_id = "m" + std::to_string(i);
      c.arm = i < 4 ? 1 : 0;
      for (int j = 0; j < 10; ++j) {
        c.individuals.push_back(
            Individual{static_cast<std::uint8_t>(j < 4 ? 1 : 0),
                       static_cast<std::uint8_t>(rng.bernoulli(0.3) ? 1 : 0)});
      }
      d.clusters.push_back(std::move(c));
    }
    double overall = estimate_effect(d, EffectKind::overall).point;
    double total = estimate_effect(d, EffectKind::total).point;
    double indirect = estimate_effect(d, EffectKind::indirect).point;
    CHECK(overall == doctest::Approx(0.4 * total + 0.6 * indirect).epsilon(1e-12));
  }
}

TEST_CASE("dispatcher routes every effect kind") {
  RngStream rng(4242);
  TrialDataset d = random_dataset(rng, 5, true);
  for (EffectKind kind :
       {EffectKind::overall, EffectKind::indirect, EffectKind::total,
        EffectKind::naive_direct, EffectKind::control_arm_contrast}) {
    EffectEstimate est = estimate(d, kind);
    CHECK(est.kind == kind);
    bool diagnostic = kind == EffectKind::naive_direct ||
                      kind == EffectKind::control_arm_contrast;
    CHECK(est.non_causal == diagnostic);
  }
}

TEST_CASE("effect kind names round-trip") {
  for (EffectKind kind :
       {EffectKind::overall, EffectKind::indirect, EffectKind::total,
        EffectKind::naive_direct, EffectKind::control_arm_contrast}) {
    auto parsed = effect_kind_from_string(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(effect_kind_from_string("direct").has_value());
}
