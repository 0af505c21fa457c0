#include "occmix/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "occmix/pmf.hpp"

namespace occmix {

LimitPrediction limit_nmix(const ModelParams& theta_true, NmixEstimator) {
  theta_true.require_valid();
  LimitPrediction lp;
  lp.mu_r_limit = theta_true.mu * theta_true.r;
  if (theta_true.c <= 0.0) {
    lp.mu_limit = std::numeric_limits<double>::infinity();
    lp.r_limit = 0.0;
    lp.mu_diverges = true;
    return lp;
  }
  lp.mu_limit = theta_true.mu / theta_true.c;
  lp.r_limit = theta_true.c * theta_true.r;
  lp.mu_diverges = false;
  return lp;
}

LimitPrediction limit_c_to_zero(const ModelParams& theta_true, bool zero_inflated,
                                std::optional<double> psi) {
  LimitPrediction lp;
  lp.mu_limit = std::numeric_limits<double>::infinity();
  lp.r_limit = 0.0;
  lp.mu_r_limit = theta_true.mu * theta_true.r;
  lp.mu_diverges = true;
  if (zero_inflated) {
    if (!psi) throw std::invalid_argument("psi required for the zero-inflated limit");
    lp.psi_limit = *psi;
  }
  return lp;
}

ZibBias zib_bias(const ModelParams& theta_true, int n_visits, double psi) {
  theta_true.require_valid();
  if (n_visits < 2) throw std::invalid_argument("n_visits must be >= 2");
  if (psi < 0.0 || psi > 1.0) throw std::invalid_argument("psi must be in [0,1]");

  const double mu = theta_true.mu, r = theta_true.r;
  const double T = static_cast<double>(n_visits);
  const double p = 1.0 - std::exp(-mu * r);
  // same floating-point expression as the pmf's zero cell at c = 0, so the
  // difference vanishes identically there
  const double qT = std::exp(-mu * r * T);
  const double f0 = pmf_closed(0, theta_true, n_visits);

  const double occ = 1.0 - qT;  // detection probability of an occupied site
  const double denom_bracket = occ / p - T * std::exp(-mu * r * (T - 1.0));
  const double delta = occ * (f0 - qT) / (denom_bracket * (1.0 - f0));

  ZibBias out;
  out.delta = delta;
  out.psi0_approx = p * psi / (p + delta);
  return out;
}

}  // namespace occmix
