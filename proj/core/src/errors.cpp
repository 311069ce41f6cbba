#include "crteffects/errors.hpp"

namespace crteffects {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_arm: return "empty arm";
    case ErrorCode::undefined_outcome: return "undefined outcome";
    case ErrorCode::all_clusters_dropped: return "all clusters dropped";
    case ErrorCode::insufficient_clusters: return "insufficient clusters";
    case ErrorCode::zero_arm_mean: return "zero arm mean";
    case ErrorCode::infeasible_scheme: return "infeasible scheme";
    case ErrorCode::unknown_stratum_label: return "unknown stratum label";
    case ErrorCode::infeasible_margins: return "infeasible margins";
    case ErrorCode::risk_out_of_range: return "risk out of range";
    case ErrorCode::missing_assignment: return "missing assignment";
    case ErrorCode::invalid_dataset: return "invalid dataset";
    case ErrorCode::invalid_config: return "invalid config";
    case ErrorCode::parse_error: return "parse error";
  }
  return "unknown error";
}

}  // namespace crteffects
