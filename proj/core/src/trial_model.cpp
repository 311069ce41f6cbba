#include "crteffects/trial_model.hpp"

#include <unordered_map>
#include <unordered_set>

#include "crteffects/errors.hpp"

namespace crteffects {

std::optional<ClusterOutcome> cluster_outcome(const ClusterRecord& cluster,
                                              StratumSelector stratum) {
  int cases = 0;
  int denom = 0;
  for (const Individual& person : cluster.individuals) {
    bool in_stratum = false;
    switch (stratum) {
      case StratumSelector::overall: in_stratum = true; break;
      case StratumSelector::participators: in_stratum = person.participation == 1; break;
      case StratumSelector::non_participators: in_stratum = person.participation == 0; break;
    }
    if (!in_stratum) continue;
    ++denom;
    cases += person.outcome;
  }
  if (denom == 0) return std::nullopt;
  return ClusterOutcome{cluster.cluster_id, cluster.arm,
                        static_cast<double>(cases) / denom, denom};
}

StratumAnnotation infer_strata(const TrialDataset& dataset) {
  StratumAnnotation annotation;
  annotation.by_cluster.reserve(dataset.clusters.size());
  for (const ClusterRecord& cluster : dataset.clusters) {
    std::vector<PrincipalStratum> strata;
    strata.reserve(cluster.individuals.size());
    for (const Individual& person : cluster.individuals) {
      strata.push_back(person.participation == 1
                           ? PrincipalStratum::always_participator
                           : PrincipalStratum::never_participator);
    }
    annotation.by_cluster.push_back(std::move(strata));
  }
  return annotation;
}

void validate_dataset(const TrialDataset& dataset) {
  std::unordered_set<std::string> seen;
  for (const ClusterRecord& cluster : dataset.clusters) {
    if (cluster.individuals.empty()) {
      throw Error(ErrorCode::invalid_dataset,
                  "cluster '" + cluster.cluster_id + "' has no individuals");
    }
    if (cluster.arm != 0 && cluster.arm != 1) {
      throw Error(ErrorCode::invalid_dataset,
                  "cluster '" + cluster.cluster_id + "' has arm " +
                      std::to_string(cluster.arm) + ", expected 0 or 1");
    }
    if (!seen.insert(cluster.cluster_id).second) {
      throw Error(ErrorCode::invalid_dataset,
                  "duplicate cluster id '" + cluster.cluster_id + "'");
    }
    for (const Individual& person : cluster.individuals) {
      if (person.participation > 1 || person.outcome > 1) {
        throw Error(ErrorCode::invalid_dataset,
                    "non-binary participation or outcome in cluster '" +
                        cluster.cluster_id + "'");
      }
    }
  }
}

std::vector<IndividualRecord> to_rows(const TrialDataset& dataset) {
  std::vector<IndividualRecord> rows;
  for (const ClusterRecord& cluster : dataset.clusters) {
    for (const Individual& person : cluster.individuals) {
      rows.push_back(IndividualRecord{cluster.cluster_id, person.participation,
                                      person.outcome, cluster.stratum_label});
    }
  }
  return rows;
}

TrialDataset from_rows(const std::vector<DatasetRow>& rows) {
  TrialDataset dataset;
  std::unordered_map<std::string, std::size_t> index;
  for (const DatasetRow& row : rows) {
    auto [it, inserted] = index.try_emplace(row.cluster_id, dataset.clusters.size());
    if (inserted) {
      ClusterRecord cluster;
      cluster.cluster_id = row.cluster_id;
      cluster.arm = row.arm;
      cluster.stratum_label = row.stratum_label;
      dataset.clusters.push_back(std::move(cluster));
    }
    ClusterRecord& cluster = dataset.clusters[it->second];
    if (cluster.arm != row.arm) {
      throw Error(ErrorCode::invalid_dataset,
                  "arm not constant within cluster '" + row.cluster_id + "'");
    }
    if (row.participation < 0 || row.participation > 1 || row.outcome < 0 ||
        row.outcome > 1) {
      throw Error(ErrorCode::invalid_dataset,
                  "non-binary participation or outcome in cluster '" +
                      row.cluster_id + "'");
    }
    cluster.individuals.push_back(
        Individual{static_cast<std::uint8_t>(row.participation),
                   static_cast<std::uint8_t>(row.outcome)});
  }
  return dataset;
}

}  // namespace crteffects
