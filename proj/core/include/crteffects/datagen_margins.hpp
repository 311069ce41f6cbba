#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "crteffects/trial_model.hpp"

namespace crteffects {

/// Target summary statistics for one arm of the margin table. Totals are
/// exact; means and SDs are printed (rounded) values the synthesized
/// dataset must reproduce after rounding to the same precision.
struct ArmMargins {
  int n_clusters = 0;
  double mean_size = 0.0;
  double sd_size = 0.0;
  double mean_participants = 0.0;
  double sd_participants = 0.0;
  long total_participants = 0;
  long total_nonparticipants = 0;
  long events_participants = 0;
  long events_nonparticipants = 0;
};

struct MarginSpec {
  ArmMargins vaccine;
  ArmMargins control;
  // Dirichlet-multinomial concentration for event allocation across
  // clusters; absent = plain multinomial (no overdispersion). Smaller
  // values spread events more unevenly, inflating between-cluster variance.
  std::optional<double> event_concentration;
};

/// Throws Error(infeasible_margins) naming the violated constraint.
void validate_margins(const MarginSpec& spec);

/// Build an individual-level dataset matching the margin table: exact arm
/// totals (participants, non-participants, events in each stratum), exact
/// cluster counts, and per-cluster size / participant counts whose mean and
/// SD round to the printed targets. Deterministic given (spec, seed).
TrialDataset synthesize(const MarginSpec& spec, std::uint64_t seed);

}  // namespace crteffects
