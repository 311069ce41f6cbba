#include "crteffects/datagen_causal.hpp"

#include <algorithm>
#include <cmath>

#include "crteffects/errors.hpp"
#include "crteffects/rng.hpp"

namespace crteffects {

namespace {

std::string cluster_name(int index, int n_clusters) {
  int width = 1;
  for (int v = n_clusters; v >= 10; v /= 10) ++width;
  std::string number = std::to_string(index + 1);
  return "cl" +
         std::string(width - std::min<int>(width, number.size()), '0') +
         number;
}

struct ClusterSums {
  int m = 0;
  int part_n = 0;
  int part_y1 = 0, part_y0 = 0;
  int nonpart_y1 = 0, nonpart_y0 = 0;
  int y1 = 0, y0 = 0;

  int nonpart_n() const { return m - part_n; }
};

ClusterSums sums_of(const WorldCluster& cluster) {
  ClusterSums s;
  s.m = static_cast<int>(cluster.individuals.size());
  for (const WorldIndividual& person : cluster.individuals) {
    s.y1 += person.y_vaccine;
    s.y0 += person.y_control;
    if (person.participation) {
      ++s.part_n;
      s.part_y1 += person.y_vaccine;
      s.part_y0 += person.y_control;
    } else {
      s.nonpart_y1 += person.y_vaccine;
      s.nonpart_y0 += person.y_control;
    }
  }
  return s;
}

}  // namespace

void validate_config(const GenerativeConfig& config) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::invalid_config, msg);
  };
  if (config.n_clusters < 2) fail("n_clusters must be >= 2");
  if (config.size_mean < 2.0) fail("size_mean must be >= 2");
  if (config.size_dispersion < 0.0) fail("size_dispersion must be >= 0");
  if (config.baseline_risk < 0.0 || config.baseline_risk > 1.0)
    fail("baseline_risk must be in [0, 1]");
  if (config.risk_heterogeneity < 0.0) fail("risk_heterogeneity must be >= 0");
  if (config.direct_efficacy < 0.0 || config.direct_efficacy > 1.0)
    fail("direct_efficacy must be in [0, 1]");
  if (config.spillover_strength < 0.0) fail("spillover_strength must be >= 0");
  if (config.n_strata < 1) fail("n_strata must be >= 1");
}

PotentialWorld generate_world(const GenerativeConfig& config) {
  validate_config(config);
  const RngStream root = RngStream(config.seed).child("world");
  const double sigma = config.risk_heterogeneity;
  const double log_mean_adjust = 0.5 * sigma * sigma;  // mean-1 multiplier

  PotentialWorld world;
  world.clusters.reserve(config.n_clusters);
  for (int i = 0; i < config.n_clusters; ++i) {
    RngStream cluster_rng = root.child(static_cast<std::uint64_t>(i));
    RngStream size_rng = cluster_rng.child("size");
    int m = static_cast<int>(std::lround(
        size_rng.normal(config.size_mean, config.size_dispersion)));
    if (m < 2) m = 2;

    WorldCluster cluster;
    cluster.cluster_id = cluster_name(i, config.n_clusters);
    if (config.n_strata > 1) {
      cluster.stratum_label = "s" + std::to_string(i % config.n_strata);
    }
    cluster.individuals.resize(m);

    // Frailty and participation first; coverage is the cluster's own
    // participation fraction and feeds every individual's vaccine-arm risk.
    // Each person draws (frailty, participation uniform, outcome uniform)
    // from their own substream, so changing efficacy or spillover never
    // shifts anyone else's draws.
    std::vector<double> frailty(m);
    std::vector<double> outcome_u(m);
    int n_participators = 0;
    for (int j = 0; j < m; ++j) {
      RngStream person_rng = cluster_rng.child(static_cast<std::uint64_t>(j));
      frailty[j] = person_rng.normal();
      double logit = config.participation_intercept +
                     config.confounding_strength * frailty[j];
      double p_participate = 1.0 / (1.0 + std::exp(-logit));
      bool participates = person_rng.uniform() < p_participate;
      cluster.individuals[j].participation = participates ? 1 : 0;
      n_participators += participates ? 1 : 0;
      outcome_u[j] = person_rng.uniform();
    }
    const double coverage = static_cast<double>(n_participators) / m;
    const double spillover_factor =
        std::exp(-config.spillover_strength * coverage);

    for (int j = 0; j < m; ++j) {
      // One shared uniform compares against both arm risks (common random
      // numbers), so a null vaccine gives identical columns exactly.
      double u = outcome_u[j];

      double risk_control =
          config.baseline_risk *
          std::exp(sigma * frailty[j] - log_mean_adjust);
      if (risk_control > 1.0) {
        throw Error(ErrorCode::risk_out_of_range,
                    "control-arm risk " + std::to_string(risk_control) +
                        " > 1 in cluster '" + cluster.cluster_id +
                        "'; reduce baseline_risk or risk_heterogeneity");
      }
      double vaccinated = cluster.individuals[j].participation ? 1.0 : 0.0;
      double risk_vaccine = risk_control *
                            (1.0 - config.direct_efficacy * vaccinated) *
                            spillover_factor;
      cluster.individuals[j].y_control = u < risk_control ? 1 : 0;
      cluster.individuals[j].y_vaccine = u < risk_vaccine ? 1 : 0;
    }
    world.clusters.push_back(std::move(cluster));
  }
  return world;
}

TrueEstimands true_estimands(const PotentialWorld& world) {
  TrueEstimands truths;
  const double n = static_cast<double>(world.clusters.size());
  bool all_have_participators = true;
  bool all_have_nonparticipators = true;

  double overall = 0.0;
  double indirect = 0.0, total = 0.0;
  double part_mean_y1 = 0.0, nonpart_mean_y1 = 0.0;
  double part_mean_y0 = 0.0, nonpart_mean_y0 = 0.0;

  for (const WorldCluster& cluster : world.clusters) {
    ClusterSums s = sums_of(cluster);
    overall += (static_cast<double>(s.y1) - s.y0) / s.m;
    if (s.part_n == 0) {
      all_have_participators = false;
    } else {
      total += (static_cast<double>(s.part_y1) - s.part_y0) / s.part_n;
      part_mean_y1 += static_cast<double>(s.part_y1) / s.part_n;
      part_mean_y0 += static_cast<double>(s.part_y0) / s.part_n;
    }
    if (s.nonpart_n() == 0) {
      all_have_nonparticipators = false;
    } else {
      indirect += (static_cast<double>(s.nonpart_y1) - s.nonpart_y0) / s.nonpart_n();
      nonpart_mean_y1 += static_cast<double>(s.nonpart_y1) / s.nonpart_n();
      nonpart_mean_y0 += static_cast<double>(s.nonpart_y0) / s.nonpart_n();
    }
  }

  truths.overall = overall / n;
  if (all_have_participators) truths.total = total / n;
  if (all_have_nonparticipators) truths.indirect = indirect / n;
  if (all_have_participators && all_have_nonparticipators) {
    truths.naive_limit = (part_mean_y1 - nonpart_mean_y1) / n;
    truths.control_limit = (part_mean_y0 - nonpart_mean_y0) / n;
  }
  return truths;
}

TrialDataset observe(const PotentialWorld& world, const Assignment& assignment) {
  TrialDataset dataset;
  dataset.clusters.reserve(world.clusters.size());
  for (const WorldCluster& cluster : world.clusters) {
    auto it = assignment.find(cluster.cluster_id);
    if (it == assignment.end()) {
      throw Error(ErrorCode::missing_assignment,
                  "no arm assigned to cluster '" + cluster.cluster_id + "'");
    }
    const int arm = it->second;
    ClusterRecord observed;
    observed.cluster_id = cluster.cluster_id;
    observed.arm = arm;
    observed.stratum_label = cluster.stratum_label;
    observed.individuals.reserve(cluster.individuals.size());
    for (const WorldIndividual& person : cluster.individuals) {
      observed.individuals.push_back(Individual{
          person.participation,
          arm == 1 ? person.y_vaccine : person.y_control});
    }
    dataset.clusters.push_back(std::move(observed));
  }
  return dataset;
}

std::vector<ClusterKey> cluster_keys(const PotentialWorld& world) {
  std::vector<ClusterKey> keys;
  keys.reserve(world.clusters.size());
  for (const WorldCluster& cluster : world.clusters) {
    keys.push_back(ClusterKey{cluster.cluster_id, cluster.stratum_label});
  }
  return keys;
}

}  // namespace crteffects
