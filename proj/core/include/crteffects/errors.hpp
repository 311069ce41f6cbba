#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crteffects {

enum class ErrorCode {
  empty_arm,              // no clusters assigned to the requested arm
  undefined_outcome,      // empty stratum hit under the Error policy
  all_clusters_dropped,   // Drop policy removed every cluster in an arm
  insufficient_clusters,  // SE requested with fewer than 2 clusters in an arm
  zero_arm_mean,          // risk ratio with a zero arm mean
  infeasible_scheme,      // randomization counts exceed stratum sizes
  unknown_stratum_label,  // scheme and clusters disagree on stratum labels
  infeasible_margins,     // no integer dataset satisfies the margin table
  risk_out_of_range,      // generative parameters imply a probability > 1
  missing_assignment,     // observe() called without an arm for some cluster
  invalid_dataset,        // dataset violates a structural invariant
  invalid_config,         // config file missing or inconsistent
  parse_error,            // malformed input file
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crteffects
