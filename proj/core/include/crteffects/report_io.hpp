#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crteffects/estimators.hpp"
#include "crteffects/mc_harness.hpp"

namespace crteffects {

/// Output scale for effect estimates. Internal arithmetic is always on raw
/// proportions; scaling happens at emission only. Risk ratios are
/// scale-free and are emitted unscaled either way.
enum class Scale { per1000, raw };

/// One entry per requested effect; failed effects carry the error message
/// instead of an estimate so one failure does not abort the others.
struct EffectReportEntry {
  EffectKind kind = EffectKind::overall;
  std::optional<EffectEstimate> estimate;
  std::optional<std::string> error;
};

struct EffectReport {
  std::vector<EffectReportEntry> entries;
  Scale scale = Scale::per1000;
};

std::string to_json(const EffectReport& report);
std::string render_text(const EffectReport& report);

std::string to_json(const MCReport& report, Scale scale);
std::string render_text(const MCReport& report, Scale scale);

}  // namespace crteffects
