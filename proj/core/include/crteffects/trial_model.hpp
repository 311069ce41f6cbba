#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crteffects {

/// One person inside a cluster: participation status and disease outcome,
/// both 0/1. Cluster membership is given by the enclosing ClusterRecord.
struct Individual {
  std::uint8_t participation = 0;
  std::uint8_t outcome = 0;
};

/// Row form of an individual, as it appears in a dataset file.
struct IndividualRecord {
  std::string cluster_id;
  int participation = 0;
  int outcome = 0;
  std::optional<std::string> stratum_label;
};

struct ClusterRecord {
  std::string cluster_id;
  int arm = 0;  // 1 = vaccine, 0 = control
  std::optional<std::string> stratum_label;
  std::vector<Individual> individuals;

  std::size_t size() const { return individuals.size(); }
};

struct TrialDataset {
  std::vector<ClusterRecord> clusters;

  std::size_t n_clusters() const { return clusters.size(); }
};

enum class StratumSelector {
  overall,           // all individuals
  participators,     // S = 1 (total effect)
  non_participators  // S = 0 (indirect effect)
};

/// A cluster-level proportion: diseased count over stratum size.
struct ClusterOutcome {
  std::string cluster_id;
  int arm = 0;
  double value = 0.0;
  int denominator = 0;
};

/// Average disease outcome in the selected stratum of one cluster.
/// Returns nullopt when the stratum is empty; the estimation layer decides
/// whether that is an error or a drop.
std::optional<ClusterOutcome> cluster_outcome(const ClusterRecord& cluster,
                                              StratumSelector stratum);

/// Principal strata under the assumption that participation does not depend
/// on the cluster's assignment: observed S = 1 means always participator,
/// S = 0 means never participator.
enum class PrincipalStratum { always_participator, never_participator };

struct StratumAnnotation {
  // Parallel to dataset.clusters / cluster.individuals.
  std::vector<std::vector<PrincipalStratum>> by_cluster;
};

/// Pure relabeling of observed participation as principal-stratum
/// membership; no data change.
StratumAnnotation infer_strata(const TrialDataset& dataset);

/// Structural checks: nonempty clusters, unique ids, binary fields.
/// Throws Error(invalid_dataset) on violation.
void validate_dataset(const TrialDataset& dataset);

/// Flatten to row form (one IndividualRecord per person, cluster order).
std::vector<IndividualRecord> to_rows(const TrialDataset& dataset);

/// Rebuild a dataset from rows; arms are supplied per cluster id by the
/// caller (row streams carry the arm column separately in dataset files).
struct DatasetRow {
  std::string cluster_id;
  int arm = 0;
  int participation = 0;
  int outcome = 0;
  std::optional<std::string> stratum_label;
};

TrialDataset from_rows(const std::vector<DatasetRow>& rows);

}  // namespace crteffects
