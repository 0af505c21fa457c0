#pragma once

#include <optional>

#include "occmix/types.hpp"

namespace occmix {

// Large-sample limits of closed-population estimators when the data follow
// the correlated-mixture model with true parameters (mu, r, c).
struct LimitPrediction {
  double mu_limit;                  // +inf when the abundance estimator diverges
  double r_limit;                   // 0 at divergence
  double mu_r_limit;                // the product limit, finite in all cases
  std::optional<double> psi_limit;  // occupancy limit, when applicable
  bool mu_diverges;
};

enum class NmixEstimator { double_visit_mle, moment };

// Limits of the closed-population (c fixed at 1) estimators on data with
// community parameter c > 0: mu -> mu/c, r -> c r, product -> mu r. The
// double-visit MLE and the moment estimators share the same limits.
LimitPrediction limit_nmix(const ModelParams& theta_true, NmixEstimator estimator);

// Limits as the community parameter approaches zero: the abundance estimate
// diverges, detection goes to zero, the product stays at mu r; when the model
// carries a zero-inflation component its occupancy estimator stays consistent.
LimitPrediction limit_c_to_zero(const ModelParams& theta_true, bool zero_inflated,
                                std::optional<double> psi = std::nullopt);

// Linearized underestimation of occupancy by the independent-visits
// zero-inflated binomial fit on correlated data:
//   psi0 ~= p/(p + Delta) * psi,  p = 1 - exp(-mu r),
//   Delta = {1-(1-p)^T}{f(0)-(1-p)^T} / ([{1-(1-p)^T}/p - T(1-p)^(T-1)]{1-f(0)}).
// Delta >= 0, equal to zero when c = 0, increasing in c.
struct ZibBias {
  double delta;
  double psi0_approx;
};
ZibBias zib_bias(const ModelParams& theta_true, int n_visits, double psi);

}  // namespace occmix
