#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "occmix/fit.hpp"
#include "occmix/inference.hpp"
#include "occmix/types.hpp"

namespace occmix {

// Multi-model fit report for one dataset: digest, per-model results with
// Wald intervals, derived quantities and an AIC ranking.
struct FitReport {
  SurveyCounts counts;
  double ci_level = 0.95;
  std::vector<FitResult> fits;
  std::vector<WaldIntervals> intervals;  // parallel to fits
  std::vector<std::string> warnings;

  double sample_occupancy() const {
    return static_cast<double>(counts.n_positive()) / counts.n_sites;
  }
  // fit indices sorted by AIC (non-converged fits last)
  std::vector<std::size_t> aic_ranking() const;
};

// Fits each requested model (two-stage route for zero-inflated families) and
// assembles the report. Per-model failures become warnings, not errors;
// throws DegenerateDataError only when the data admit no fit at all.
FitReport build_fit_report(const SurveyCounts& counts, const std::vector<ModelSpec>& models,
                           const OptimOptions& opts = {}, double ci_level = 0.95);

nlohmann::ordered_json report_to_json(const FitReport& report);
std::string report_to_text(const FitReport& report);

nlohmann::ordered_json test_to_json(const TestResult& result);
std::string test_to_text(const TestResult& result, double alpha = 0.05);

}  // namespace occmix
