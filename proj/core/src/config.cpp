#include "crteffects/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crteffects/errors.hpp"

namespace crteffects {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::invalid_config, message);
}

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      bad("unknown key '" + key + "' in " + section);
    }
  }
}

template <typename T>
T require(const json& obj, const std::string& section, const std::string& key) {
  if (!obj.contains(key)) bad(section + " is missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(section + "." + key + " has the wrong type");
  }
}

template <typename T>
T optional_or(const json& obj, const std::string& section,
              const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(section + "." + key + " has the wrong type");
  }
}

ArmMargins parse_arm(const json& obj, const std::string& section) {
  check_keys(obj, section,
             {"n_clusters", "mean_size", "sd_size", "mean_participants",
              "sd_participants", "total_participants", "total_nonparticipants",
              "events_participants", "events_nonparticipants"});
  ArmMargins arm;
  arm.n_clusters = require<int>(obj, section, "n_clusters");
  arm.mean_size = require<double>(obj, section, "mean_size");
  arm.sd_size = require<double>(obj, section, "sd_size");
  arm.mean_participants = require<double>(obj, section, "mean_participants");
  arm.sd_participants = require<double>(obj, section, "sd_participants");
  arm.total_participants = require<long>(obj, section, "total_participants");
  arm.total_nonparticipants =
      require<long>(obj, section, "total_nonparticipants");
  arm.events_participants = require<long>(obj, section, "events_participants");
  arm.events_nonparticipants =
      require<long>(obj, section, "events_nonparticipants");
  return arm;
}

MarginsSection parse_margins(const json& obj) {
  check_keys(obj, "margins",
             {"seed", "event_concentration", "vaccine", "control"});
  MarginsSection section;
  section.seed = optional_or<std::uint64_t>(obj, "margins", "seed", 0);
  if (obj.contains("event_concentration")) {
    section.spec.event_concentration =
        require<double>(obj, "margins", "event_concentration");
  }
  if (!obj.contains("vaccine") || !obj.contains("control")) {
    bad("margins needs both 'vaccine' and 'control' arms");
  }
  section.spec.vaccine = parse_arm(obj.at("vaccine"), "margins.vaccine");
  section.spec.control = parse_arm(obj.at("control"), "margins.control");
  return section;
}

GenerativeConfig parse_causal(const json& obj) {
  check_keys(obj, "causal",
             {"seed", "n_clusters", "size_mean", "size_dispersion",
              "baseline_risk", "risk_heterogeneity", "participation_intercept",
              "confounding_strength", "direct_efficacy", "spillover_strength",
              "n_strata"});
  GenerativeConfig config;
  config.seed = optional_or<std::uint64_t>(obj, "causal", "seed", 0);
  config.n_clusters = require<int>(obj, "causal", "n_clusters");
  config.size_mean = require<double>(obj, "causal", "size_mean");
  config.size_dispersion = require<double>(obj, "causal", "size_dispersion");
  config.baseline_risk = require<double>(obj, "causal", "baseline_risk");
  config.risk_heterogeneity =
      require<double>(obj, "causal", "risk_heterogeneity");
  config.participation_intercept =
      require<double>(obj, "causal", "participation_intercept");
  config.confounding_strength =
      require<double>(obj, "causal", "confounding_strength");
  config.direct_efficacy = require<double>(obj, "causal", "direct_efficacy");
  config.spillover_strength =
      require<double>(obj, "causal", "spillover_strength");
  config.n_strata = optional_or<int>(obj, "causal", "n_strata", 1);
  validate_config(config);
  return config;
}

RandomizationScheme parse_randomization(const json& obj) {
  check_keys(obj, "randomization",
             {"kind", "seed", "n_treated", "treated_per_stratum"});
  RandomizationScheme scheme;
  scheme.seed = optional_or<std::uint64_t>(obj, "randomization", "seed", 0);
  const std::string kind = require<std::string>(obj, "randomization", "kind");
  if (kind == "completely_randomized") {
    scheme.kind = CompletelyRandomized{
        require<int>(obj, "randomization", "n_treated")};
  } else if (kind == "stratified") {
    if (!obj.contains("treated_per_stratum")) {
      bad("stratified randomization needs 'treated_per_stratum'");
    }
    StratifiedBlocked blocked;
    try {
      blocked.treated_per_stratum =
          obj.at("treated_per_stratum").get<std::map<std::string, int>>();
    } catch (const json::exception&) {
      bad("randomization.treated_per_stratum must map stratum labels to counts");
    }
    scheme.kind = std::move(blocked);
  } else {
    bad("randomization.kind must be 'completely_randomized' or 'stratified'");
  }
  return scheme;
}

}  // namespace

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) bad("config root must be a JSON object");
  check_keys(doc, "config", {"margins", "causal", "randomization"});

  Config config;
  if (doc.contains("margins")) config.margins = parse_margins(doc.at("margins"));
  if (doc.contains("causal")) config.causal = parse_causal(doc.at("causal"));
  if (doc.contains("randomization")) {
    config.randomization = parse_randomization(doc.at("randomization"));
  }
  if (!config.margins && !config.causal && !config.randomization) {
    bad("config has no usable sections "
        "(expected margins, causal, or randomization)");
  }
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::invalid_config, "cannot open config '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace crteffects
