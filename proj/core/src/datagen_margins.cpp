#include "crteffects/datagen_margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "crteffects/errors.hpp"
#include "crteffects/rng.hpp"

namespace crteffects {

namespace {

[[noreturn]] void infeasible(const std::string& certificate) {
  throw Error(ErrorCode::infeasible_margins, certificate);
}

double sample_sd(const std::vector<int>& x) {
  if (x.size() < 2) return 0.0;
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0.0;
  for (int v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (x.size() - 1));
}

/**
 * Integer vector with an exact sum whose sample SD rounds to the printed
 * target: seeded normal draw, rounding, sum repair, then sum-preserving
 * pairwise +-1 transfers until the SD lands in the target window. When a
 * center vector is given the initial draw starts there (the centers already
 * carry the intended spread).
 */
std::vector<int> integer_margin_vector(int n, long total, double sd_target,
                                       const std::vector<int>& lo,
                                       const std::vector<int>& hi,
                                       RngStream rng,
                                       const std::string& what,
                                       const std::vector<double>* center = nullptr) {
  long lo_sum = 0, hi_sum = 0;
  for (int i = 0; i < n; ++i) {
    lo_sum += lo[i];
    hi_sum += hi[i];
  }
  if (total < lo_sum || total > hi_sum) {
    infeasible(what + ": total " + std::to_string(total) +
               " outside feasible range [" + std::to_string(lo_sum) + ", " +
               std::to_string(hi_sum) + "]");
  }

  const double mean = static_cast<double>(total) / n;
  const double draw_sd = center ? 0.0 : sd_target;
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) {
    double c = center ? (*center)[i] : mean;
    int v = static_cast<int>(std::lround(draw_sd > 0.0 ? rng.normal(c, draw_sd) : c));
    x[i] = std::clamp(v, lo[i], hi[i]);
  }

  // Repair the sum with seeded round-robin +-1 nudges.
  long delta = total - std::accumulate(x.begin(), x.end(), 0L);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  while (delta != 0) {
    bool progressed = false;
    for (int i : order) {
      if (delta > 0 && x[i] < hi[i]) {
        ++x[i];
        --delta;
        progressed = true;
      } else if (delta < 0 && x[i] > lo[i]) {
        --x[i];
        ++delta;
        progressed = true;
      }
      if (delta == 0) break;
    }
    if (!progressed) infeasible(what + ": cannot repair sum within bounds");
  }

  if (n < 2) {
    if (std::lround(sd_target) != 0) {
      infeasible(what + ": SD target positive with a single cluster");
    }
    return x;
  }

  // The window sits slightly inside the half-unit rounding band so a later
  // recomputation in floating point rounds to the same printed value.
  const double window_lo = sd_target - 0.48;
  const double window_hi = sd_target + 0.48;
  double ss = 0.0;
  for (int v : x) ss += (v - mean) * (v - mean);

  // Transfer one unit from donor to recipient: keeps the sum exact and
  // changes the squared spread by 2*(x_r - x_d) + 2. Donors below the mean
  // paired with recipients above widen; the reverse with a gap of at least
  // 2 shrinks. Candidates are drawn at random so no cluster turns into a
  // manufactured outlier.
  auto pick = [&](const std::vector<int>& pool) {
    return pool[rng.uniform_below(pool.size())];
  };
  for (int iter = 0; iter < 200000; ++iter) {
    double sd = std::sqrt(ss / (n - 1));
    if (sd >= window_lo && sd <= window_hi) break;
    const bool widen = sd < window_lo;
    std::vector<int> donors, recipients;
    for (int i = 0; i < n; ++i) {
      if (widen) {
        if (x[i] > lo[i] && x[i] <= mean) donors.push_back(i);
        if (x[i] < hi[i] && x[i] >= mean) recipients.push_back(i);
      } else {
        if (x[i] > lo[i] && x[i] >= mean + 1.0) donors.push_back(i);
        if (x[i] < hi[i] && x[i] <= mean - 1.0) recipients.push_back(i);
      }
    }
    int donor = -1, recipient = -1;
    for (int attempt = 0; attempt < 16 && !donors.empty() && !recipients.empty();
         ++attempt) {
      int d = pick(donors);
      int r = pick(recipients);
      if (d == r) continue;
      double change = 2.0 * (x[r] - x[d]) + 2.0;
      if (widen ? change > 0.0 : change < 0.0) {
        donor = d;
        recipient = r;
        break;
      }
    }
    if (donor < 0) {
      infeasible(what + ": SD target " + std::to_string(sd_target) +
                 " unreachable within bounds (stuck at " + std::to_string(sd) +
                 ")");
    }
    ss += 2.0 * (x[recipient] - x[donor]) + 2.0;
    --x[donor];
    ++x[recipient];
  }
  double sd = sample_sd(x);
  if (sd < window_lo || sd > window_hi) {
    infeasible(what + ": SD calibration did not converge (reached " +
               std::to_string(sd) + ", target " + std::to_string(sd_target) +
               ")");
  }
  return x;
}

/**
 * Spread `total` events over clusters proportionally to stratum size,
 * optionally through Dirichlet-multinomial weights (concentration = the
 * Dirichlet total mass; smaller = more between-cluster spread).
 */
std::vector<int> allocate_events(const std::vector<int>& capacity, long total,
                                 std::optional<double> concentration,
                                 RngStream rng, const std::string& what) {
  const int n = static_cast<int>(capacity.size());
  std::vector<int> events(n, 0);
  if (total == 0) return events;
  long cap_sum = std::accumulate(capacity.begin(), capacity.end(), 0L);
  if (total > cap_sum) {
    infeasible(what + ": " + std::to_string(total) + " events exceed " +
               std::to_string(cap_sum) + " individuals");
  }

  std::vector<double> weights(n);
  double weight_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (capacity[i] == 0) {
      weights[i] = 0.0;
    } else if (concentration) {
      weights[i] = rng.gamma(*concentration * capacity[i] / cap_sum);
    } else {
      weights[i] = static_cast<double>(capacity[i]);
    }
    weight_sum += weights[i];
  }
  if (!(weight_sum > 0.0)) {  // degenerate gamma underflow
    for (int i = 0; i < n; ++i) weights[i] = capacity[i];
    weight_sum = static_cast<double>(cap_sum);
  }
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }

  for (long e = 0; e < total; ++e) {
    int chosen = -1;
    for (int attempt = 0; attempt < 64; ++attempt) {
      double u = rng.uniform() * weight_sum;
      int i = static_cast<int>(
          std::lower_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      if (i >= n) i = n - 1;
      if (events[i] < capacity[i]) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {  // nearly-full capacities: take the first with room
      for (int i = 0; i < n; ++i) {
        if (events[i] < capacity[i]) {
          chosen = i;
          break;
        }
      }
    }
    ++events[chosen];
  }
  return events;
}

void check_arm(const ArmMargins& m, const std::string& arm_name) {
  auto certify = [&](const std::string& msg) { infeasible(arm_name + ": " + msg); };
  if (m.n_clusters < 1) certify("n_clusters must be >= 1");
  if (m.total_participants < 0 || m.total_nonparticipants < 0)
    certify("negative stratum total");
  if (m.events_participants < 0 ||
      m.events_participants > m.total_participants)
    certify("participant events exceed participants");
  if (m.events_nonparticipants < 0 ||
      m.events_nonparticipants > m.total_nonparticipants)
    certify("non-participant events exceed non-participants");
  if (m.sd_size < 0.0 || m.sd_participants < 0.0) certify("negative SD");

  const long total_size = m.total_participants + m.total_nonparticipants;
  if (total_size < m.n_clusters) certify("fewer individuals than clusters");
  const double mean_size = static_cast<double>(total_size) / m.n_clusters;
  if (std::abs(mean_size - m.mean_size) > 0.5 + 1e-9)
    certify("stratum totals inconsistent with printed mean cluster size (" +
            std::to_string(mean_size) + " vs " + std::to_string(m.mean_size) +
            ")");
  const double mean_part =
      static_cast<double>(m.total_participants) / m.n_clusters;
  if (std::abs(mean_part - m.mean_participants) > 0.5 + 1e-9)
    certify("participant total inconsistent with printed mean participants");
  if (m.total_participants > 0 && m.total_nonparticipants > 0 &&
      (m.total_participants < m.n_clusters ||
       m.total_nonparticipants < m.n_clusters))
    certify("cannot give every cluster both strata");
}

void append_arm(TrialDataset& dataset, const ArmMargins& m, int arm,
                const std::string& prefix,
                std::optional<double> concentration, RngStream rng) {
  const int n = m.n_clusters;
  const long total_size = m.total_participants + m.total_nonparticipants;
  const bool both_strata =
      m.total_participants > 0 && m.total_nonparticipants > 0;
  const int min_size = both_strata ? 2 : 1;

  std::vector<int> lo(n, min_size), hi(n, static_cast<int>(total_size));
  std::vector<int> sizes =
      integer_margin_vector(n, total_size, m.sd_size, lo, hi,
                            rng.child("sizes"), prefix + " cluster sizes");

  std::vector<int> participants(n, 0);
  if (m.total_participants == 0) {
    // all never-participators
  } else if (m.total_nonparticipants == 0) {
    participants = sizes;
  } else {
    // Center the draw on a fixed participation fraction of each cluster's
    // size so participant counts track sizes; the residual spread tops the
    // SD up to its own target.
    const double frac = static_cast<double>(m.total_participants) / total_size;
    const double sd_sizes = sample_sd(sizes);
    const double explained = frac * sd_sizes;
    const double resid = std::sqrt(std::max(
        0.0, m.sd_participants * m.sd_participants - explained * explained));
    RngStream center_rng = rng.child("centers");
    std::vector<double> centers(n);
    for (int i = 0; i < n; ++i)
      centers[i] = frac * sizes[i] + center_rng.normal(0.0, resid);
    std::vector<int> plo(n), phi(n);
    for (int i = 0; i < n; ++i) {
      plo[i] = 1;
      phi[i] = sizes[i] - 1;
    }
    participants = integer_margin_vector(
        n, m.total_participants, m.sd_participants, plo, phi,
        rng.child("participants"), prefix + " participants per cluster",
        &centers);
  }

  std::vector<int> nonparticipants(n);
  for (int i = 0; i < n; ++i) nonparticipants[i] = sizes[i] - participants[i];

  std::vector<int> part_events =
      allocate_events(participants, m.events_participants, concentration,
                      rng.child("participant-events"),
                      prefix + " participant events");
  std::vector<int> nonpart_events =
      allocate_events(nonparticipants, m.events_nonparticipants, concentration,
                      rng.child("nonparticipant-events"),
                      prefix + " non-participant events");

  int width = 1;
  for (int v = n; v >= 10; v /= 10) ++width;
  for (int i = 0; i < n; ++i) {
    std::string number = std::to_string(i + 1);
    ClusterRecord cluster;
    cluster.cluster_id =
        prefix + std::string(width - std::min<int>(width, number.size()), '0') +
        number;
    cluster.arm = arm;
    cluster.individuals.reserve(sizes[i]);
    for (int j = 0; j < participants[i]; ++j) {
      cluster.individuals.push_back(
          Individual{1, static_cast<std::uint8_t>(j < part_events[i] ? 1 : 0)});
    }
    for (int j = 0; j < nonparticipants[i]; ++j) {
      cluster.individuals.push_back(Individual{
          0, static_cast<std::uint8_t>(j < nonpart_events[i] ? 1 : 0)});
    }
    dataset.clusters.push_back(std::move(cluster));
  }
}

}  // namespace

void validate_margins(const MarginSpec& spec) {
  check_arm(spec.vaccine, "vaccine arm");
  check_arm(spec.control, "control arm");
  if (spec.event_concentration && !(*spec.event_concentration > 0.0)) {
    infeasible("event_concentration must be positive");
  }
}

TrialDataset synthesize(const MarginSpec& spec, std::uint64_t seed) {
  validate_margins(spec);
  RngStream root = RngStream(seed).child("margins");
  TrialDataset dataset;
  append_arm(dataset, spec.vaccine, 1, "v", spec.event_concentration,
             root.child("vaccine"));
  append_arm(dataset, spec.control, 0, "c", spec.event_concentration,
             root.child("control"));
  return dataset;
}

}  // namespace crteffects
