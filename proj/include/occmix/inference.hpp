#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "occmix/fit.hpp"
#include "occmix/model_spec.hpp"
#include "occmix/types.hpp"

namespace occmix {

struct Interval {
  double lo, hi;
  bool truncated_lo = false;
  bool truncated_hi = false;
};

// Wald intervals, estimate +- z * SE on the natural scale, truncated to the
// parameter domain (recorded in the truncation flags). Entries are absent for
// fixed parameters and when no usable standard error exists.
struct WaldIntervals {
  double level = 0.95;
  std::array<std::optional<Interval>, 4> param;
};
WaldIntervals wald_ci(const FitResult& fit, double level = 0.95);

// Likelihood-ratio statistic 2(loglik_alt - loglik_null), clamped at zero.
// Throws NotNestedError unless the pair is one of zib < zinc, zin < zinc,
// nmix < ncmix.
struct LrStat {
  double value;
  bool clamped;  // the raw statistic was (numerically) negative
};
LrStat lrt(const FitResult& null_fit, const FitResult& alt_fit);

inline constexpr const char* kBoundaryNullNote =
    "null hypothesis on the parameter boundary: the large-sample reference "
    "distribution is a mixture of 0 and chi-square, not plain chi-square; "
    "p-value obtained by parametric bootstrap";

struct TestResult {
  ModelSpec null_spec;
  ModelSpec alt_spec;
  double lr_stat = 0.0;
  int n_boot = 0;    // successful bootstrap replicates
  int n_failed = 0;  // replicates abandoned after the retry cap
  double p_boot = 1.0;
  std::string p_asymptotic_note = kBoundaryNullNote;
  FitResult null_fit;
  FitResult alt_fit;
};

// Parametric bootstrap test: fit both models, then simulate n_boot datasets
// from the fitted null (same n and T), refit both models on each and compare
// the replicated statistics with the observed one,
//   p = (1 + #{LR* >= LR}) / (successes + 1).
// Replicates where either refit fails are redrawn up to a retry cap, then
// counted in n_failed. Deterministic given (counts, n_boot, seed), whatever
// the worker count.
TestResult bootstrap_pvalue(const ModelSpec& null_spec, const ModelSpec& alt_spec,
                            const SurveyCounts& counts, int n_boot, std::uint64_t seed,
                            const OptimOptions& opts = {}, int n_threads = 1);

}  // namespace occmix
