#include "crteffects/mc_harness.hpp"

#include <array>
#include <cmath>
#include <thread>

#include "crteffects/errors.hpp"

namespace crteffects {

namespace {

constexpr std::array<EffectKind, 5> kKinds = {
    EffectKind::overall, EffectKind::indirect, EffectKind::total,
    EffectKind::naive_direct, EffectKind::control_arm_contrast};

struct ReplicateOutcome {
  std::optional<double> point;
  std::optional<double> se;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
};

using ReplicateRow = std::array<ReplicateOutcome, kKinds.size()>;

ReplicateRow estimate_replicate(const TrialDataset& dataset,
                                const MCOptions& options) {
  ReplicateRow row;
  EstimateOptions eopts;
  eopts.contrast = Contrast::risk_difference;
  eopts.policy = options.policy;
  eopts.critical_value = options.critical_value;
  for (std::size_t k = 0; k < kKinds.size(); ++k) {
    try {
      EffectEstimate est = estimate(dataset, kKinds[k], eopts);
      row[k] = ReplicateOutcome{est.point, est.standard_error, est.ci_lower,
                                est.ci_upper};
    } catch (const Error&) {
      row[k] = ReplicateOutcome{};
    }
  }
  return row;
}

// Static partition over replicate indices; results land in a preallocated
// slot per replicate, so thread count never changes the report.
template <typename Fn>
void for_each_replicate(int n_replicates, int n_threads, Fn&& fn) {
  if (n_threads <= 1) {
    for (int r = 0; r < n_replicates; ++r) fn(r);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t] {
      for (int r = t; r < n_replicates; r += n_threads) fn(r);
    });
  }
  for (std::thread& w : workers) w.join();
}

std::array<std::optional<double>, kKinds.size()> truth_row(
    const TrueEstimands& truths) {
  return {truths.overall, truths.indirect, truths.total, truths.naive_limit,
          truths.control_limit};
}

MCReport aggregate(const std::vector<ReplicateRow>& rows,
                   const std::array<std::optional<double>, kKinds.size()>& truths,
                   bool keep_replicates) {
  MCReport report;
  report.n_replicates = static_cast<int>(rows.size());
  for (std::size_t k = 0; k < kKinds.size(); ++k) {
    MCEffectRow out;
    out.kind = kKinds[k];
    out.true_value = truths[k];

    double sum = 0.0;
    int used = 0;
    for (const ReplicateRow& row : rows) {
      if (row[k].point) {
        sum += *row[k].point;
        ++used;
      }
    }
    out.n_used = used;
    out.n_failed = report.n_replicates - used;
    if (used > 0) {
      out.mean_estimate = sum / used;
      double ss = 0.0, se_sum = 0.0;
      int covered = 0, with_ci = 0;
      for (const ReplicateRow& row : rows) {
        if (!row[k].point) continue;
        double d = *row[k].point - out.mean_estimate;
        ss += d * d;
        if (row[k].se) se_sum += *row[k].se;
        if (row[k].ci_lower && row[k].ci_upper) {
          ++with_ci;
          if (out.true_value && *row[k].ci_lower <= *out.true_value &&
              *out.true_value <= *row[k].ci_upper) {
            ++covered;
          }
        }
      }
      out.empirical_sd = used > 1 ? std::sqrt(ss / (used - 1)) : 0.0;
      out.mc_standard_error = out.empirical_sd / std::sqrt(used);
      out.mean_estimated_se = used > 0 ? se_sum / used : 0.0;
      out.coverage = with_ci > 0 && out.true_value
                         ? static_cast<double>(covered) / with_ci
                         : 0.0;
      out.bias = out.true_value ? out.mean_estimate - *out.true_value : 0.0;
    }
    report.rows.push_back(out);
  }
  if (keep_replicates) {
    report.replicate_estimates.assign(kKinds.size(), {});
    for (std::size_t k = 0; k < kKinds.size(); ++k) {
      report.replicate_estimates[k].reserve(rows.size());
      for (const ReplicateRow& row : rows) {
        report.replicate_estimates[k].push_back(row[k].point);
      }
    }
  }
  return report;
}

}  // namespace

MCReport run_mc(const PotentialWorld& world, const RandomizationScheme& scheme,
                const MCOptions& options) {
  if (options.n_replicates < 2) {
    throw Error(ErrorCode::invalid_config, "n_replicates must be >= 2");
  }
  const std::vector<ClusterKey> keys = cluster_keys(world);
  const RngStream root = RngStream(options.seed).child("mc");
  std::vector<ReplicateRow> rows(options.n_replicates);

  for_each_replicate(options.n_replicates, options.n_threads, [&](int r) {
    RngStream rng = root.child("replicate").child(static_cast<std::uint64_t>(r));
    Assignment assignment = assign(keys, scheme.kind, rng);
    TrialDataset dataset = observe(world, assignment);
    rows[r] = estimate_replicate(dataset, options);
  });

  return aggregate(rows, truth_row(true_estimands(world)),
                   options.keep_replicates);
}

MCReport run_mc_regenerated(const GenerativeConfig& config,
                            const RandomizationScheme& scheme,
                            const MCOptions& options) {
  if (options.n_replicates < 2) {
    throw Error(ErrorCode::invalid_config, "n_replicates must be >= 2");
  }
  const RngStream root = RngStream(options.seed).child("mc-superpop");
  std::vector<ReplicateRow> rows(options.n_replicates);
  std::vector<std::array<std::optional<double>, kKinds.size()>> world_truths(
      options.n_replicates);

  for_each_replicate(options.n_replicates, options.n_threads, [&](int r) {
    RngStream rng = root.child("replicate").child(static_cast<std::uint64_t>(r));
    GenerativeConfig replicate_config = config;
    replicate_config.seed = rng.child("world-seed").next_u64();
    PotentialWorld world = generate_world(replicate_config);
    world_truths[r] = truth_row(true_estimands(world));
    Assignment assignment = assign(cluster_keys(world), scheme.kind, rng);
    rows[r] = estimate_replicate(observe(world, assignment), options);
  });

  // Super-population truth: the average of per-world finite truths, over
  // worlds where the estimand is defined.
  std::array<std::optional<double>, kKinds.size()> truths;
  for (std::size_t k = 0; k < kKinds.size(); ++k) {
    double sum = 0.0;
    int defined = 0;
    for (const auto& t : world_truths) {
      if (t[k]) {
        sum += *t[k];
        ++defined;
      }
    }
    if (defined > 0) truths[k] = sum / defined;
  }
  return aggregate(rows, truths, options.keep_replicates);
}

}  // namespace crteffects
