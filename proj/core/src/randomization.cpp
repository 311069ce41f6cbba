#include "crteffects/randomization.hpp"

#include <algorithm>

#include "crteffects/errors.hpp"

namespace crteffects {

namespace {

// Equiprobable size-k subset: shuffle, take the first k.
void assign_block(std::vector<std::string>& ids, int n_treated,
                  RngStream& rng, Assignment& out) {
  rng.shuffle(ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[ids[i]] = i < static_cast<std::size_t>(n_treated) ? 1 : 0;
  }
}

}  // namespace

std::vector<ClusterKey> cluster_keys(const TrialDataset& dataset) {
  std::vector<ClusterKey> keys;
  keys.reserve(dataset.clusters.size());
  for (const ClusterRecord& cluster : dataset.clusters) {
    keys.push_back(ClusterKey{cluster.cluster_id, cluster.stratum_label});
  }
  return keys;
}

Assignment assign(const std::vector<ClusterKey>& clusters,
                  const std::variant<CompletelyRandomized, StratifiedBlocked>& kind,
                  RngStream& rng) {
  Assignment out;
  const int n = static_cast<int>(clusters.size());

  if (const auto* cr = std::get_if<CompletelyRandomized>(&kind)) {
    if (cr->n_treated < 1 || cr->n_treated > n - 1) {
      throw Error(ErrorCode::infeasible_scheme,
                  "n_treated must be in [1, n-1], got " +
                      std::to_string(cr->n_treated) + " of " +
                      std::to_string(n));
    }
    std::vector<std::string> ids;
    ids.reserve(clusters.size());
    for (const ClusterKey& key : clusters) ids.push_back(key.id);
    assign_block(ids, cr->n_treated, rng, out);
    return out;
  }

  const auto& scheme = std::get<StratifiedBlocked>(kind);
  std::map<std::string, std::vector<std::string>> by_stratum;
  for (const ClusterKey& key : clusters) {
    if (!key.stratum_label) {
      throw Error(ErrorCode::unknown_stratum_label,
                  "cluster '" + key.id +
                      "' has no stratum label under a stratified scheme");
    }
    if (!scheme.treated_per_stratum.count(*key.stratum_label)) {
      throw Error(ErrorCode::unknown_stratum_label,
                  "stratum '" + *key.stratum_label +
                      "' is not in the scheme");
    }
    by_stratum[*key.stratum_label].push_back(key.id);
  }
  int total_treated = 0;
  for (const auto& [label, n_treated] : scheme.treated_per_stratum) {
    auto it = by_stratum.find(label);
    if (it == by_stratum.end()) {
      throw Error(ErrorCode::unknown_stratum_label,
                  "scheme names stratum '" + label +
                      "' but no cluster carries it");
    }
    const int stratum_size = static_cast<int>(it->second.size());
    if (n_treated < 0 || n_treated > stratum_size) {
      throw Error(ErrorCode::infeasible_scheme,
                  "stratum '" + label + "' has " +
                      std::to_string(stratum_size) + " clusters, cannot treat " +
                      std::to_string(n_treated));
    }
    total_treated += n_treated;
  }
  if (total_treated < 1 || total_treated > n - 1) {
    throw Error(ErrorCode::infeasible_scheme,
                "scheme must treat at least one and leave at least one "
                "control cluster overall");
  }
  // std::map iteration keeps stratum order deterministic.
  for (auto& [label, ids] : by_stratum) {
    RngStream stratum_rng = rng.child(label);
    assign_block(ids, scheme.treated_per_stratum.at(label), stratum_rng, out);
  }
  return out;
}

Assignment assign(const std::vector<ClusterKey>& clusters,
                  const RandomizationScheme& scheme) {
  RngStream rng = RngStream(scheme.seed).child("assign");
  return assign(clusters, scheme.kind, rng);
}

}  // namespace crteffects
