#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crteffects/trial_model.hpp"

namespace crteffects {

enum class Contrast { risk_difference, risk_ratio };

/// What to do with clusters whose selected stratum is empty.
enum class EmptyPolicy { error, drop };

enum class EffectKind {
  overall,
  indirect,
  total,
  naive_direct,        // participant minus non-participant, vaccine arm
  control_arm_contrast // same contrast in the control arm (diagnostic)
};

struct EffectEstimate {
  EffectKind kind = EffectKind::overall;
  Contrast contrast = Contrast::risk_difference;
  double point = 0.0;
  // Absent when only the point estimate was requested. For risk ratios the
  // standard error is on the log scale.
  std::optional<double> standard_error;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  int n_treated_clusters = 0;
  int n_control_clusters = 0;
  std::vector<std::string> dropped_clusters;
  // Set for naive_direct and control_arm_contrast: the contrast compares
  // self-selected strata and is not a causal effect.
  bool non_causal = false;
};

struct EstimateOptions {
  Contrast contrast = Contrast::risk_difference;
  EmptyPolicy policy = EmptyPolicy::error;
  bool point_only = false;
  double critical_value = 1.96;  // normal 97.5% quantile, Wald intervals
};

struct ArmMean {
  double mean = 0.0;
  int n_clusters = 0;
  std::vector<std::string> dropped;
};

/// Unweighted average of cluster-level outcomes over clusters in one arm.
ArmMean arm_mean(const TrialDataset& dataset, int arm, StratumSelector stratum,
                 EmptyPolicy policy);

/// Difference in (or ratio of) arm means of cluster-level outcomes, with
/// unpooled two-sample SE over clusters and Wald confidence interval.
/// Accepts overall, indirect, or total.
EffectEstimate estimate_effect(const TrialDataset& dataset, EffectKind kind,
                               const EstimateOptions& options = {});

/// Participant minus non-participant disease proportions averaged over
/// vaccine-arm clusters. Flagged non-causal: the strata are self-selected.
/// SE uses the paired per-cluster differences.
EffectEstimate naive_direct_estimate(const TrialDataset& dataset,
                                     const EstimateOptions& options = {});

/// The same within-cluster stratum contrast in the control arm. Under no
/// confounding and no placebo effect its estimand is zero, so a nonzero
/// value is direct evidence of participation-outcome confounding.
EffectEstimate control_arm_stratum_contrast(const TrialDataset& dataset,
                                            const EstimateOptions& options = {});

/// Dispatch on kind. naive_direct and control_arm_contrast are always risk
/// differences; the contrast option is ignored for them.
EffectEstimate estimate(const TrialDataset& dataset, EffectKind kind,
                        const EstimateOptions& options = {});

std::string_view to_string(EffectKind kind);
std::string_view to_string(Contrast contrast);
std::optional<EffectKind> effect_kind_from_string(std::string_view name);

}  // namespace crteffects
