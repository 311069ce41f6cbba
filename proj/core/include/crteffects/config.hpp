#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "crteffects/datagen_causal.hpp"
#include "crteffects/datagen_margins.hpp"
#include "crteffects/randomization.hpp"

namespace crteffects {

/// Config files are JSON documents with up to three sections:
/// "margins" (MarginSpec + seed), "causal" (GenerativeConfig), and
/// "randomization" (scheme kind, counts, seed).
struct MarginsSection {
  MarginSpec spec;
  std::uint64_t seed = 0;
};

struct Config {
  std::optional<MarginsSection> margins;
  std::optional<GenerativeConfig> causal;
  std::optional<RandomizationScheme> randomization;
};

/// Throws Error(parse_error) on malformed JSON, Error(invalid_config) on
/// missing or ill-typed fields.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace crteffects
