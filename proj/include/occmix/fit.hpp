#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "occmix/model_spec.hpp"
#include "occmix/types.hpp"

namespace occmix {

// Optimization-scale parameter box. Estimates that land within a factor of
// ten of a bound are reported with a boundary flag.
inline constexpr double kMuLo = 1e-6;
inline constexpr double kMuHi = 1e6;
inline constexpr double kProbLo = 1e-8;
inline constexpr double kProbHi = 1.0 - 1e-8;

struct OptimOptions {
  int n_starts = 5;            // moment-informed, structured variants, random
  int simplex_max_iter = 4000;
  double tol_rel_loglik = 1e-10;
  double tol_param = 1e-8;
  bool polish = true;          // Newton refinement of the best simplex result
  std::uint64_t seed = 0x51edF17ull;  // drives the random start
  std::vector<std::array<double, 4>> extra_starts;  // natural-scale (mu,r,c,psi)
};

struct FitResult {
  ModelSpec spec;
  // mu, r, c, psi; fixed slots hold their fixed values, psi = 1 when the
  // family has no zero-inflation component
  std::array<double, 4> estimates{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> std_err{};  // NaN where unavailable
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = false;
  bool se_ok = false;
  std::array<bool, 4> at_boundary{};
  bool identifiability_warning = false;
  int n_restarts_used = 0;

  double mu() const { return estimates[kMu]; }
  double r() const { return estimates[kR]; }
  double c() const { return estimates[kC]; }
  double psi() const { return estimates[kPsi]; }
};

// Maximum-likelihood fit by multi-start simplex search over transformed
// coordinates (log mu, logit r/c/psi) with a Newton polish. For
// zero-inflated families this maximizes the joint likelihood including psi.
// Throws DegenerateDataError when no site has a detection.
FitResult fit(const ModelSpec& spec, const SurveyCounts& counts,
              const OptimOptions& opts = {});

// Two-stage fit for zero-inflated families: maximize the conditional
// likelihood of the positive cells over theta, then set
// psi = (n - m_0) / {n f(+; theta)}, clamped to 1 with a boundary flag.
FitResult fit_zi_conditional(const ModelSpec& spec, const SurveyCounts& counts,
                             const OptimOptions& opts = {});

// Default route: the two-stage fit for zero-inflated families (equivalent to
// the joint MLE where interior), the joint fit otherwise.
FitResult fit_model(const ModelSpec& spec, const SurveyCounts& counts,
                    const OptimOptions& opts = {});

// Closed-form restricted MLE for double-visit surveys at a known community
// parameter: mu = c z1^2/(2 z1 + z2), r = (2 z1 + z2)/(c z1) with
// z1 = log{2n/(2 m_0 + m_1)}, z2 = log(m_0/n).
// Throws InvalidStatisticError when the counts put the MLE outside (0, inf).
struct DoubleVisitEstimates {
  double mu;
  double r;
};
DoubleVisitEstimates closed_form_double_visit(const SurveyCounts& counts, double c);

// Method-of-moments estimators of the closed-population model: p = ybar/T,
// then r solves ybar2 = Tp + T(T-1){2p - 1 + (1-p)^(2-r)} on (0, 1], and
// mu = -log(1-p)/r. Empty when the second-moment equation has no interior
// root (e.g. data consistent with independent visits).
struct MomentEstimates {
  double mu;
  double r;
};
std::optional<MomentEstimates> moment_estimators(const SurveyCounts& counts);
std::optional<MomentEstimates> moment_estimators_from_moments(double ybar, double y2bar,
                                                              int n_visits);

// Standard errors from the inverse negative Hessian of the applicable
// log-likelihood, differenced on the natural scale at the estimates.
// ok = false (all entries NaN) when the observed information is not positive
// definite or an estimate sits on the domain boundary.
struct StdErrorResult {
  std::array<double, 4> se{};
  bool ok = false;
};
StdErrorResult std_errors(const ModelSpec& spec, const SurveyCounts& counts,
                          const std::array<double, 4>& estimates);

// 2k - 2 loglik, k = number of free parameters.
double aic_value(int n_free, double loglik);

// The deterministic multi-start initial points used by fit(); exposed so the
// monotone-likelihood property can be checked from outside.
std::vector<std::array<double, 4>> multistart_points(const ModelSpec& spec,
                                                     const SurveyCounts& counts,
                                                     const OptimOptions& opts);

}  // namespace occmix
