#pragma once

#include <iosfwd>
#include <string>

#include "crteffects/datagen_causal.hpp"
#include "crteffects/trial_model.hpp"

namespace crteffects {

// Dataset files are UTF-8, LF-terminated CSV with header
//   cluster_id,arm,participation,outcome[,stratum_label]
// one row per individual, arm constant within cluster.

std::string serialize_dataset(const TrialDataset& dataset);
void write_dataset(const TrialDataset& dataset, const std::string& path);

/// Parses and validates; throws Error(parse_error) with the offending row
/// number, or Error(invalid_dataset) for structural violations.
TrialDataset parse_dataset(std::istream& in);
TrialDataset read_dataset(const std::string& path);

// Counterfactual side-table: header
//   cluster_id,participation,y_vaccine,y_control[,stratum_label]
// one row per individual, same cluster order as the dataset file.

std::string serialize_world(const PotentialWorld& world);
void write_world(const PotentialWorld& world, const std::string& path);
PotentialWorld parse_world(std::istream& in);
PotentialWorld read_world(const std::string& path);

}  // namespace crteffects
