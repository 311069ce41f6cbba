#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crteffects/randomization.hpp"
#include "crteffects/trial_model.hpp"

namespace crteffects {

/**
 * Parameters of the generative causal model.
 *
 * Per cluster: size ~ round(Normal(size_mean, size_dispersion)), floored at
 * 2. Per individual: frailty z ~ Normal(0,1); participation ~ Bernoulli with
 * logit(participation_intercept + confounding_strength * z); infection
 * probability under arm a is
 *
 *   baseline_risk * exp(risk_heterogeneity * z - mu)
 *                 * (1 - direct_efficacy * S * a)
 *                 * exp(-spillover_strength * coverage * a)
 *
 * with mu = risk_heterogeneity^2 / 2 so the frailty multiplier has mean 1,
 * and coverage = the cluster's own participation fraction. Both potential
 * outcomes are drawn with a common uniform per individual, so a null vaccine
 * yields identical counterfactual columns exactly.
 */
struct GenerativeConfig {
  int n_clusters = 0;
  double size_mean = 0.0;
  double size_dispersion = 0.0;
  double baseline_risk = 0.0;
  double risk_heterogeneity = 0.0;  // frailty scale, >= 0
  double participation_intercept = 0.0;
  double confounding_strength = 0.0;  // frailty-participation association
  double direct_efficacy = 0.0;       // in [0, 1]
  double spillover_strength = 0.0;    // >= 0
  int n_strata = 1;  // randomization stratum labels, assigned round-robin
  std::uint64_t seed = 0;
};

/// Throws Error(invalid_config) on out-of-range parameters.
void validate_config(const GenerativeConfig& config);

struct WorldIndividual {
  std::uint8_t participation = 0;  // identical under both arms
  std::uint8_t y_vaccine = 0;      // outcome if the cluster gets vaccine
  std::uint8_t y_control = 0;      // outcome if the cluster gets control
};

struct WorldCluster {
  std::string cluster_id;
  std::optional<std::string> stratum_label;
  std::vector<WorldIndividual> individuals;

  std::size_t size() const { return individuals.size(); }
};

/// Full counterfactual table: both potential outcome columns for every
/// individual. Outcomes in one cluster depend only on that cluster's arm.
struct PotentialWorld {
  std::vector<WorldCluster> clusters;
};

/// Finite-population truths over the generated clusters: mean over clusters
/// of (outcome under vaccine) - (outcome under control) per stratum
/// definition, plus the probability limits of the two within-arm stratum
/// contrasts. Stratum-restricted fields are absent when some cluster has an
/// empty stratum.
struct TrueEstimands {
  double overall = 0.0;
  std::optional<double> indirect;
  std::optional<double> total;
  // Limit of the naive direct estimator: participant-stratum mean minus
  // non-participant-stratum mean, both under vaccine. Not a causal effect.
  std::optional<double> naive_limit;
  // Same contrast under control; zero in the absence of confounding.
  std::optional<double> control_limit;
};

/// Throws Error(risk_out_of_range) if the realized parameters imply an
/// infection probability above 1 for any individual.
PotentialWorld generate_world(const GenerativeConfig& config);

TrueEstimands true_estimands(const PotentialWorld& world);

/// Reveal one potential outcome column per cluster according to its
/// assigned arm. Throws Error(missing_assignment) on uncovered clusters.
TrialDataset observe(const PotentialWorld& world, const Assignment& assignment);

std::vector<ClusterKey> cluster_keys(const PotentialWorld& world);

}  // namespace crteffects
