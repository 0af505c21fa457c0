#pragma once

#include <array>
#include <utility>

#include "occmix/types.hpp"

namespace occmix {

// Largest visit count for which the alternating closed form is attempted;
// beyond it the all-positive conditional sum is used unconditionally.
inline constexpr int kClosedFormMaxVisits = 12;

// Fallback trigger: the compensated alternating sum is trusted only while
// |sum| >= kCancellationGuard * sum(|terms|), i.e. at most ~3 digits lost.
inline constexpr double kCancellationGuard = 1e-3;

inline constexpr double kDefaultTailEps = 1e-12;

// P(Y = y) for the per-site occurrence count under theta with n_visits
// visits. Closed-form alternating sum with compensated summation; falls back
// to pmf_oracle when cancellation makes the sum untrustworthy or when
// n_visits > kClosedFormMaxVisits. Result clamped to [0, 1].
double pmf_closed(int y, const ModelParams& theta, int n_visits);

// Same probability via the all-positive sum over the shared latent count K:
// given K = k each visit is non-detected with probability
// q_k = (1-r)^k * exp(-d*mu*r), so
//   P(Y = y) = sum_k Poisson(k; c*mu) * C(T,y) (1-q_k)^y q_k^(T-y),
// truncated once the accumulated Poisson mass exceeds 1 - tail_eps.
double pmf_oracle(int y, const ModelParams& theta, int n_visits,
                  double tail_eps = kDefaultTailEps);

namespace detail {
// Raw closed-form evaluation, exposed for the safeguard tests.
struct ClosedFormEval {
  double value;        // C(T,y) * sum (no clamping)
  double sum;          // compensated alternating sum
  double sum_abs;      // sum of |terms|
  bool trustworthy;    // sum > 0 and above the cancellation guard
};
ClosedFormEval pmf_closed_raw(int y, const ModelParams& theta, int n_visits);

double binom_coeff(int n, int k);
}  // namespace detail

// Multinomial log-likelihood sum_j m_j log f(j; theta). Returns -inf if some
// needed cell probability underflows to zero while its count is positive.
double loglik(const ModelParams& theta, const SurveyCounts& counts);

// Zero-inflated log-likelihood:
// m_0 log{(1-psi) + psi f(0)} + sum_{j>=1} m_j log{psi f(j)}.
double loglik_zi(const ZIModelParams& params, const SurveyCounts& counts);

// Conditional log-likelihood of the positive cells,
// sum_{j>=1} m_j log{ f(j; theta) / f(+; theta) }; free of psi.
double loglik_conditional(const ModelParams& theta, const SurveyCounts& counts);

// Multinomial score sum_j (df(j)/dtheta) (m_j - n f(j)) / f(j) with the cell
// derivatives taken by central finite differences in (mu, r, c).
struct ScoreResult {
  std::array<double, 3> value{};   // d/dmu, d/dr, d/dc
  bool boundary_unreliable = false;  // set when c is at 0 or 1
};
ScoreResult score(const ModelParams& theta, const SurveyCounts& counts);

// (f(0; theta), 1 - f(0; theta)).
std::pair<double, double> f_zero_and_plus(const ModelParams& theta, int n_visits);

// Occupancy rates implied by the abundance process:
// per_visit = P(N_ij > 0) = 1 - exp(-mu)
// any_visit = P(some N_ij > 0 over T visits) = 1 - exp{-mu - (T-1) d mu}
struct OccupancyRates {
  double per_visit;
  double any_visit;
};
OccupancyRates derived_occupancy(const ModelParams& theta, int n_visits);

// First two marginal moments of the occurrence count: E[Y] = T p with
// p = 1 - exp(-mu r) (free of c), and E[Y^2] summed from the pmf.
struct OccurrenceMoments {
  double ey;
  double ey2;
};
OccurrenceMoments marginal_moments(const ModelParams& theta, int n_visits);

}  // namespace occmix
