#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crteffects/rng.hpp"
#include "crteffects/trial_model.hpp"

namespace crteffects {

struct CompletelyRandomized {
  int n_treated = 0;
};

struct StratifiedBlocked {
  std::map<std::string, int> treated_per_stratum;
};

struct RandomizationScheme {
  std::variant<CompletelyRandomized, StratifiedBlocked> kind;
  std::uint64_t seed = 0;
};

/// What assign() needs to know about a cluster.
struct ClusterKey {
  std::string id;
  std::optional<std::string> stratum_label;
};

using Assignment = std::map<std::string, int>;  // cluster id -> arm

std::vector<ClusterKey> cluster_keys(const TrialDataset& dataset);

/// Draw a treatment assignment with exactly the scheme's counts treated,
/// every subset of the required size equiprobable within its stratum.
/// Deterministic given the stream state (Fisher-Yates per stratum).
Assignment assign(const std::vector<ClusterKey>& clusters,
                  const std::variant<CompletelyRandomized, StratifiedBlocked>& kind,
                  RngStream& rng);

/// Convenience overload drawing from the scheme's own seed.
Assignment assign(const std::vector<ClusterKey>& clusters,
                  const RandomizationScheme& scheme);

}  // namespace crteffects
