#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smcp/experiment.hpp"
#include "smcp/optimal_dp.hpp"
#include "smcp/order_sampler.hpp"
#include "smcp/q_estimator.hpp"

namespace smcp {

// Every number in a rendered report carries 9 significant digits.

inline constexpr std::string_view kReportCsvHeader =
    "instance,algo,seed,trials,mean_alg,mean_opt,opt_mode,ratio,ci95";

std::string report_csv_row(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);  // header + row
std::string report_to_json(const ExperimentReport& report);

// {"n", "mode", "matcher", "zeta", "samples", "pairs": [{"u","v","p","q"}...],
//  "vertex_totals": [...]}
std::string q_estimate_to_json(const ProbGraph& g, const QEstimate& est);

struct SamplerCheck {
  TargetProfile profile;
  double margin = 0.0;             // feasibility margin y of the input targets
  std::vector<double> scaled;      // targets the policy was built for (y * r)
  std::vector<double> achieved;    // exact first-occurrence probabilities
  double total = 0.0;              // sum of achieved
  double any_occurs = 0.0;         // 1 - prod(1 - p)
  std::size_t nodes = 0;
  bool feasible = false;           // margin >= 1 (within tolerance)
  bool met = false;                // achieved >= r for every event
};

// Builds a policy for the profile scaled by its margin (so infeasible profiles
// still get a table) and evaluates it exactly.
SamplerCheck sampler_check(const TargetProfile& profile);
std::string sampler_check_text(const SamplerCheck& check);
std::string sampler_check_json(const SamplerCheck& check);

// {"p": [...], "r": [...]}
TargetProfile profile_from_json(std::string_view text);

std::string hardness_text(const Hardness& h);
std::string hardness_json(const Hardness& h);

// Writes text to path, throwing kIo on failure.
void write_text_file(const std::string& path, std::string_view text);

}  // namespace smcp
