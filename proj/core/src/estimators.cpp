#include "crteffects/estimators.hpp"

#include <cmath>
#include <numeric>

#include "crteffects/errors.hpp"

namespace crteffects {

namespace {

StratumSelector stratum_for(EffectKind kind) {
  switch (kind) {
    case EffectKind::overall: return StratumSelector::overall;
    case EffectKind::indirect: return StratumSelector::non_participators;
    case EffectKind::total: return StratumSelector::participators;
    default: break;
  }
  throw Error(ErrorCode::invalid_config,
              "estimate_effect accepts overall, indirect, or total");
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// Sample variance, n-1 denominator.
double variance_of(const std::vector<double>& values, double mean) {
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

struct ArmValues {
  std::vector<double> values;
  std::vector<std::string> dropped;
};

ArmValues collect_arm(const TrialDataset& dataset, int arm,
                      StratumSelector stratum, EmptyPolicy policy) {
  ArmValues out;
  bool arm_seen = false;
  for (const ClusterRecord& cluster : dataset.clusters) {
    if (cluster.arm != arm) continue;
    arm_seen = true;
    auto outcome = cluster_outcome(cluster, stratum);
    if (outcome) {
      out.values.push_back(outcome->value);
    } else if (policy == EmptyPolicy::error) {
      throw Error(ErrorCode::undefined_outcome,
                  "cluster '" + cluster.cluster_id +
                      "' has an empty stratum (empty-policy is error)");
    } else {
      out.dropped.push_back(cluster.cluster_id);
    }
  }
  if (!arm_seen) {
    throw Error(ErrorCode::empty_arm,
                "no clusters with arm " + std::to_string(arm));
  }
  if (out.values.empty()) {
    throw Error(ErrorCode::all_clusters_dropped,
                "every cluster in arm " + std::to_string(arm) +
                    " has an empty stratum");
  }
  return out;
}

void require_clusters_for_se(std::size_t k, int arm) {
  if (k < 2) {
    throw Error(ErrorCode::insufficient_clusters,
                "SE needs at least 2 clusters in arm " + std::to_string(arm) +
                    ", got " + std::to_string(k));
  }
}

// Mean of paired within-cluster stratum differences over one arm.
EffectEstimate stratum_contrast(const TrialDataset& dataset, int arm,
                                EffectKind kind,
                                const EstimateOptions& options) {
  std::vector<double> diffs;
  std::vector<std::string> dropped;
  bool arm_seen = false;
  for (const ClusterRecord& cluster : dataset.clusters) {
    if (cluster.arm != arm) continue;
    arm_seen = true;
    auto part = cluster_outcome(cluster, StratumSelector::participators);
    auto nonpart = cluster_outcome(cluster, StratumSelector::non_participators);
    if (part && nonpart) {
      diffs.push_back(part->value - nonpart->value);
    } else if (options.policy == EmptyPolicy::error) {
      throw Error(ErrorCode::undefined_outcome,
                  "cluster '" + cluster.cluster_id +
                      "' lacks a stratum needed for the within-arm contrast");
    } else {
      dropped.push_back(cluster.cluster_id);
    }
  }
  if (!arm_seen) {
    throw Error(ErrorCode::empty_arm,
                "no clusters with arm " + std::to_string(arm));
  }
  if (diffs.empty()) {
    throw Error(ErrorCode::all_clusters_dropped,
                "no cluster in arm " + std::to_string(arm) +
                    " has both strata");
  }

  EffectEstimate est;
  est.kind = kind;
  est.contrast = Contrast::risk_difference;
  est.point = mean_of(diffs);
  est.dropped_clusters = std::move(dropped);
  est.non_causal = true;
  (arm == 1 ? est.n_treated_clusters : est.n_control_clusters) =
      static_cast<int>(diffs.size());

  if (!options.point_only) {
    require_clusters_for_se(diffs.size(), arm);
    // Both terms come from the same clusters, so the SE uses the sample
    // variance of the paired per-cluster differences.
    double se = std::sqrt(variance_of(diffs, est.point) /
                          static_cast<double>(diffs.size()));
    est.standard_error = se;
    est.ci_lower = est.point - options.critical_value * se;
    est.ci_upper = est.point + options.critical_value * se;
  }
  return est;
}

}  // namespace

ArmMean arm_mean(const TrialDataset& dataset, int arm, StratumSelector stratum,
                 EmptyPolicy policy) {
  ArmValues collected = collect_arm(dataset, arm, stratum, policy);
  return ArmMean{mean_of(collected.values),
                 static_cast<int>(collected.values.size()),
                 std::move(collected.dropped)};
}

EffectEstimate estimate_effect(const TrialDataset& dataset, EffectKind kind,
                               const EstimateOptions& options) {
  const StratumSelector stratum = stratum_for(kind);
  ArmValues treated = collect_arm(dataset, 1, stratum, options.policy);
  ArmValues control = collect_arm(dataset, 0, stratum, options.policy);
  const double m1 = mean_of(treated.values);
  const double m0 = mean_of(control.values);
  const auto k1 = treated.values.size();
  const auto k0 = control.values.size();

  EffectEstimate est;
  est.kind = kind;
  est.contrast = options.contrast;
  est.n_treated_clusters = static_cast<int>(k1);
  est.n_control_clusters = static_cast<int>(k0);
  est.dropped_clusters = std::move(treated.dropped);
  est.dropped_clusters.insert(est.dropped_clusters.end(),
                              control.dropped.begin(), control.dropped.end());

  if (options.contrast == Contrast::risk_difference) {
    est.point = m1 - m0;
    if (!options.point_only) {
      require_clusters_for_se(k1, 1);
      require_clusters_for_se(k0, 0);
      double se = std::sqrt(variance_of(treated.values, m1) / k1 +
                            variance_of(control.values, m0) / k0);
      est.standard_error = se;
      est.ci_lower = est.point - options.critical_value * se;
      est.ci_upper = est.point + options.critical_value * se;
    }
    return est;
  }

  // Risk ratio.
  if (m0 == 0.0) {
    throw Error(ErrorCode::zero_arm_mean,
                "risk ratio undefined: control arm mean is 0");
  }
  est.point = m1 / m0;
  if (!options.point_only) {
    require_clusters_for_se(k1, 1);
    require_clusters_for_se(k0, 0);
    if (m1 == 0.0) {
      throw Error(ErrorCode::zero_arm_mean,
                  "risk ratio interval undefined: treated arm mean is 0");
    }
    // Delta method on the log scale; the stored SE is the log-scale SE and
    // the interval bounds are exponentiated back.
    double se_log = std::sqrt(variance_of(treated.values, m1) / (k1 * m1 * m1) +
                              variance_of(control.values, m0) / (k0 * m0 * m0));
    est.standard_error = se_log;
    est.ci_lower = std::exp(std::log(est.point) - options.critical_value * se_log);
    est.ci_upper = std::exp(std::log(est.point) + options.critical_value * se_log);
  }
  return est;
}

EffectEstimate naive_direct_estimate(const TrialDataset& dataset,
                                     const EstimateOptions& options) {
  return stratum_contrast(dataset, 1, EffectKind::naive_direct, options);
}

EffectEstimate control_arm_stratum_contrast(const TrialDataset& dataset,
                                            const EstimateOptions& options) {
  return stratum_contrast(dataset, 0, EffectKind::control_arm_contrast, options);
}

EffectEstimate estimate(const TrialDataset& dataset, EffectKind kind,
                        const EstimateOptions& options) {
  switch (kind) {
    case EffectKind::overall:
    case EffectKind::indirect:
    case EffectKind::total:
      return estimate_effect(dataset, kind, options);
    case EffectKind::naive_direct:
      return naive_direct_estimate(dataset, options);
    case EffectKind::control_arm_contrast:
      return control_arm_stratum_contrast(dataset, options);
  }
  throw Error(ErrorCode::invalid_config, "unknown effect kind");
}

std::string_view to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::overall: return "overall";
    case EffectKind::indirect: return "indirect";
    case EffectKind::total: return "total";
    case EffectKind::naive_direct: return "naive-direct";
    case EffectKind::control_arm_contrast: return "control-contrast";
  }
  return "unknown";
}

std::string_view to_string(Contrast contrast) {
  return contrast == Contrast::risk_difference ? "risk-difference"
                                               : "risk-ratio";
}

std::optional<EffectKind> effect_kind_from_string(std::string_view name) {
  if (name == "overall") return EffectKind::overall;
  if (name == "indirect") return EffectKind::indirect;
  if (name == "total") return EffectKind::total;
  if (name == "naive-direct") return EffectKind::naive_direct;
  if (name == "control-contrast") return EffectKind::control_arm_contrast;
  return std::nullopt;
}

}  // namespace crteffects
