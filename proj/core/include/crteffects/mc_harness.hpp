#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crteffects/datagen_causal.hpp"
#include "crteffects/estimators.hpp"
#include "crteffects/randomization.hpp"

namespace crteffects {

struct MCOptions {
  int n_replicates = 1000;
  std::uint64_t seed = 0;
  EmptyPolicy policy = EmptyPolicy::drop;
  int n_threads = 1;
  double critical_value = 1.96;
  // Retain per-replicate point estimates (memory, for diagnostics/tests).
  bool keep_replicates = false;
};

struct MCEffectRow {
  EffectKind kind = EffectKind::overall;
  std::optional<double> true_value;  // absent if undefined in the world
  double mean_estimate = 0.0;
  double bias = 0.0;           // mean_estimate - true_value
  double empirical_sd = 0.0;   // SD of replicate estimates (n-1 denominator)
  double mean_estimated_se = 0.0;
  double coverage = 0.0;       // CIs containing true_value / n_used
  int n_used = 0;              // replicates that produced an estimate
  int n_failed = 0;            // replicates hitting estimation errors
  double mc_standard_error = 0.0;  // empirical_sd / sqrt(n_used)
};

struct MCReport {
  int n_replicates = 0;
  std::vector<MCEffectRow> rows;  // overall, indirect, total, naive, control
  // Only filled when keep_replicates is set: replicate-level estimates,
  // rows-major ([kind][replicate]).
  std::vector<std::vector<std::optional<double>>> replicate_estimates;
};

/**
 * Repeatedly randomize the fixed world, observe, and estimate all five
 * effect kinds. Truths are the world's finite-population estimands; for the
 * two within-arm contrasts the truth row is the corresponding probability
 * limit. Replicate r draws from an independent substream of seed, so the
 * report is invariant to execution order and thread count, and extending
 * n_replicates preserves earlier replicates.
 */
MCReport run_mc(const PotentialWorld& world, const RandomizationScheme& scheme,
                const MCOptions& options);

/// Super-population mode: regenerate the world each replicate from the
/// config (fresh seed substream per replicate). The truth row is the mean
/// of the per-replicate world estimands.
MCReport run_mc_regenerated(const GenerativeConfig& config,
                            const RandomizationScheme& scheme,
                            const MCOptions& options);

}  // namespace crteffects
