#include "crteffects/report_io.hpp"

#include <cstdio>

#include <json.hpp>

namespace crteffects {

namespace {

using nlohmann::json;

constexpr const char* kNonCausalWarning =
    "not a causal effect: compares disease between self-selected "
    "participant and non-participant strata within one arm";

bool scaled_contrast(const EffectEstimate& est) {
  return est.contrast == Contrast::risk_difference;
}

double apply_scale(double value, Scale scale, bool scalable) {
  return (scale == Scale::per1000 && scalable) ? value * 1000.0 : value;
}

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

json estimate_to_json(const EffectEstimate& est, Scale scale) {
  const bool scalable = scaled_contrast(est);
  json j;
  j["contrast"] = std::string(to_string(est.contrast));
  j["point"] = apply_scale(est.point, scale, scalable);
  j["standard_error"] = est.standard_error
                            ? json(apply_scale(*est.standard_error, scale,
                                               scalable))
                            : json(nullptr);
  j["ci_lower"] = est.ci_lower
                      ? json(apply_scale(*est.ci_lower, scale, scalable))
                      : json(nullptr);
  j["ci_upper"] = est.ci_upper
                      ? json(apply_scale(*est.ci_upper, scale, scalable))
                      : json(nullptr);
  j["n_treated_clusters"] = est.n_treated_clusters;
  j["n_control_clusters"] = est.n_control_clusters;
  j["dropped_clusters"] = est.dropped_clusters;
  json warnings = json::array();
  if (est.non_causal) warnings.push_back(kNonCausalWarning);
  j["warnings"] = warnings;
  return j;
}

}  // namespace

std::string to_json(const EffectReport& report) {
  json j;
  j["scale"] = report.scale == Scale::per1000 ? "per1000" : "raw";
  json effects = json::array();
  for (const EffectReportEntry& entry : report.entries) {
    json e;
    e["kind"] = std::string(to_string(entry.kind));
    if (entry.estimate) {
      e["estimate"] = estimate_to_json(*entry.estimate, report.scale);
    }
    if (entry.error) e["error"] = *entry.error;
    effects.push_back(std::move(e));
  }
  j["effects"] = std::move(effects);
  return j.dump(2) + "\n";
}

std::string render_text(const EffectReport& report) {
  std::string out;
  out += report.scale == Scale::per1000
             ? "Effect estimates (risk differences per 1000 people; "
               "risk ratios unscaled)\n"
             : "Effect estimates (raw proportions)\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-17s %-15s %10s %10s %21s %9s\n",
                "effect", "contrast", "point", "SE", "95% CI", "clusters");
  out += line;
  for (const EffectReportEntry& entry : report.entries) {
    if (!entry.estimate) {
      std::snprintf(line, sizeof(line), "%-17s %s\n",
                    std::string(to_string(entry.kind)).c_str(),
                    ("error: " + entry.error.value_or("unknown")).c_str());
      out += line;
      continue;
    }
    const EffectEstimate& est = *entry.estimate;
    const bool scalable = scaled_contrast(est);
    const std::string ci =
        est.ci_lower ? "(" + fmt(apply_scale(*est.ci_lower, report.scale, scalable)) +
                           ", " +
                           fmt(apply_scale(*est.ci_upper, report.scale, scalable)) +
                           ")"
                     : "-";
    std::string se = est.standard_error
                         ? fmt(apply_scale(*est.standard_error, report.scale,
                                           scalable))
                         : "-";
    char clusters[32];
    std::snprintf(clusters, sizeof(clusters), "%d/%d", est.n_treated_clusters,
                  est.n_control_clusters);
    std::snprintf(line, sizeof(line), "%-17s %-15s %10s %10s %21s %9s\n",
                  std::string(to_string(est.kind)).c_str(),
                  std::string(to_string(est.contrast)).c_str(),
                  fmt(apply_scale(est.point, report.scale, scalable)).c_str(),
                  se.c_str(), ci.c_str(), clusters);
    out += line;
    if (!est.dropped_clusters.empty()) {
      out += "  dropped:";
      for (const std::string& id : est.dropped_clusters) out += " " + id;
      out += "\n";
    }
    if (est.non_causal) {
      out += "  warning: ";
      out += kNonCausalWarning;
      out += "\n";
    }
  }
  return out;
}

std::string to_json(const MCReport& report, Scale scale) {
  auto value_or_null = [&](const std::optional<double>& v) {
    return v ? json(apply_scale(*v, scale, true)) : json(nullptr);
  };
  json j;
  j["n_replicates"] = report.n_replicates;
  j["scale"] = scale == Scale::per1000 ? "per1000" : "raw";
  json rows = json::array();
  for (const MCEffectRow& row : report.rows) {
    json r;
    r["kind"] = std::string(to_string(row.kind));
    r["true_value"] = value_or_null(row.true_value);
    r["mean_estimate"] = apply_scale(row.mean_estimate, scale, true);
    r["bias"] = apply_scale(row.bias, scale, true);
    r["empirical_sd"] = apply_scale(row.empirical_sd, scale, true);
    r["mean_estimated_se"] = apply_scale(row.mean_estimated_se, scale, true);
    r["coverage"] = row.coverage;
    r["n_used"] = row.n_used;
    r["n_failed"] = row.n_failed;
    r["mc_standard_error"] = apply_scale(row.mc_standard_error, scale, true);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string render_text(const MCReport& report, Scale scale) {
  std::string out = "Monte Carlo report (" +
                    std::to_string(report.n_replicates) + " replicates";
  out += scale == Scale::per1000 ? ", risk differences per 1000)\n" : ")\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-17s %10s %10s %10s %10s %10s %9s %7s\n",
                "effect", "truth", "mean", "bias", "emp. SD", "mean SE",
                "coverage", "failed");
  out += line;
  for (const MCEffectRow& row : report.rows) {
    std::string truth = row.true_value
                            ? fmt(apply_scale(*row.true_value, scale, true))
                            : std::string("-");
    std::snprintf(line, sizeof(line),
                  "%-17s %10s %10s %10s %10s %10s %9s %7d\n",
                  std::string(to_string(row.kind)).c_str(), truth.c_str(),
                  fmt(apply_scale(row.mean_estimate, scale, true)).c_str(),
                  fmt(apply_scale(row.bias, scale, true)).c_str(),
                  fmt(apply_scale(row.empirical_sd, scale, true)).c_str(),
                  fmt(apply_scale(row.mean_estimated_se, scale, true)).c_str(),
                  fmt(row.coverage).c_str(), row.n_failed);
    out += line;
  }
  return out;
}

}  // namespace crteffects
