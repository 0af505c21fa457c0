#include "occmix/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogFloor = 1e-300;

void check_domain(int y, const ModelParams& theta, int n_visits) {
  theta.require_valid();
  if (n_visits < 1) throw std::invalid_argument("n_visits must be >= 1");
  if (y < 0 || y > n_visits) throw std::domain_error("occurrence count out of 0..T");
}

}  // namespace

namespace detail {

double binom_coeff(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

ClosedFormEval pmf_closed_raw(int y, const ModelParams& theta, int n_visits) {
  const double mu = theta.mu, r = theta.r, c = theta.c, d = theta.d();
  // Each term carries the prefactor exp(-d mu r T - c mu) folded into its
  // exponent, which is then <= 0; no overflow for any admissible theta.
  double sum = 0.0, comp = 0.0, sum_abs = 0.0;
  for (int k = 0; k <= y; ++k) {
    const double expo = c * mu * (std::pow(1.0 - r, n_visits - y + k) - 1.0) +
                        d * mu * r * static_cast<double>(y - k - n_visits);
    double term = binom_coeff(y, k) * std::exp(expo);
    sum_abs += term;
    if (k & 1) term = -term;
    // Kahan step
    const double t = term - comp;
    const double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }
  ClosedFormEval ev;
  ev.sum = sum;
  ev.sum_abs = sum_abs;
  ev.value = binom_coeff(n_visits, y) * sum;
  ev.trustworthy = sum > 0.0 && sum >= kCancellationGuard * sum_abs;
  return ev;
}

}  // namespace detail

double pmf_closed(int y, const ModelParams& theta, int n_visits) {
  check_domain(y, theta, n_visits);
  if (n_visits <= kClosedFormMaxVisits) {
    const auto ev = detail::pmf_closed_raw(y, theta, n_visits);
    if (ev.trustworthy) return std::clamp(ev.value, 0.0, 1.0);
  }
  return pmf_oracle(y, theta, n_visits);
}

double pmf_oracle(int y, const ModelParams& theta, int n_visits, double tail_eps) {
  check_domain(y, theta, n_visits);
  if (tail_eps <= 0.0) throw std::invalid_argument("tail_eps must be > 0");
  const double mu = theta.mu, r = theta.r, d = theta.d();
  const double lambda = theta.c * mu;
  const double no_detect_new = std::exp(-d * mu * r);

  auto visit_term = [&](double q_k) {
    return std::pow(1.0 - q_k, y) * std::pow(q_k, n_visits - y);
  };

  if (lambda <= 0.0) {
    return std::clamp(detail::binom_coeff(n_visits, y) * visit_term(no_detect_new), 0.0, 1.0);
  }

  // Sum Poisson(k; lambda) weights from k_lo upward until the accumulated
  // mass reaches 1 - tail_eps, never beyond the deterministic cap. The
  // log-space start keeps the weights representable for large lambda.
  const int k_cap = static_cast<int>(lambda + 12.0 * std::sqrt(lambda + 1.0) + 30.0);
  int k_lo = 0;
  double w = std::exp(-lambda);
  if (lambda > 700.0) {
    k_lo = std::max(0, static_cast<int>(lambda - 12.0 * std::sqrt(lambda + 1.0) - 30.0));
    w = std::exp(k_lo * std::log(lambda) - lambda - std::lgamma(k_lo + 1.0));
  }

  double acc = 0.0, comp = 0.0, mass = 0.0;
  double q_k = std::pow(1.0 - r, k_lo) * no_detect_new;
  for (int k = k_lo; k <= k_cap; ++k) {
    if (k > k_lo) {
      w *= lambda / k;
      q_k *= 1.0 - r;
    }
    mass += w;
    const double t = w * visit_term(q_k) - comp;
    const double s = acc + t;
    comp = (s - acc) - t;
    acc = s;
    if (mass >= 1.0 - tail_eps) break;
  }
  return std::clamp(detail::binom_coeff(n_visits, y) * acc, 0.0, 1.0);
}

double loglik(const ModelParams& theta, const SurveyCounts& counts) {
  counts.require_valid();
  double ll = 0.0;
  for (int j = 0; j <= counts.n_visits; ++j) {
    if (counts.m[j] == 0) continue;
    const double f = pmf_closed(j, theta, counts.n_visits);
    if (f < kLogFloor) return kNegInf;
    ll += static_cast<double>(counts.m[j]) * std::log(f);
  }
  return ll;
}

double loglik_zi(const ZIModelParams& params, const SurveyCounts& counts) {
  counts.require_valid();
  params.require_valid();
  const double psi = params.psi;
  double ll = 0.0;
  if (counts.m[0] > 0) {
    const double p0 = (1.0 - psi) + psi * pmf_closed(0, params.base, counts.n_visits);
    if (p0 < kLogFloor) return kNegInf;
    ll += static_cast<double>(counts.m[0]) * std::log(p0);
  }
  for (int j = 1; j <= counts.n_visits; ++j) {
    if (counts.m[j] == 0) continue;
    const double pj = psi * pmf_closed(j, params.base, counts.n_visits);
    if (pj < kLogFloor) return kNegInf;
    ll += static_cast<double>(counts.m[j]) * std::log(pj);
  }
  return ll;
}

double loglik_conditional(const ModelParams& theta, const SurveyCounts& counts) {
  counts.require_valid();
  const double f0 = pmf_closed(0, theta, counts.n_visits);
  const double fplus = 1.0 - f0;
  double ll = 0.0;
  for (int j = 1; j <= counts.n_visits; ++j) {
    if (counts.m[j] == 0) continue;
    const double fj = pmf_closed(j, theta, counts.n_visits);
    if (fj < kLogFloor || fplus < kLogFloor) return kNegInf;
    ll += static_cast<double>(counts.m[j]) * (std::log(fj) - std::log(fplus));
  }
  return ll;
}

ScoreResult score(const ModelParams& theta, const SurveyCounts& counts) {
  counts.require_valid();
  theta.require_valid();
  const int T = counts.n_visits;
  const double n = static_cast<double>(counts.n_sites);

  ScoreResult out;
  out.boundary_unreliable = theta.c <= 0.0 || theta.c >= 1.0;

  const double base_h = 1e-6;
  for (int p = 0; p < 3; ++p) {
    double h = base_h * std::max(1.0, std::abs(p == 0 ? theta.mu : 1.0));
    // keep the stencil inside the parameter domain
    if (p == 0) h = std::min(h, theta.mu / 2.0);
    if (p == 1) h = std::min({h, theta.r / 2.0, (1.0 - theta.r) / 2.0 + 1e-300});
    if (p == 2) h = std::min({h, theta.c / 2.0 + 1e-300, (1.0 - theta.c) / 2.0 + 1e-300});
    if (h <= 0.0) h = base_h;

    double comp = 0.0;
    for (int j = 0; j <= T; ++j) {
      ModelParams lo = theta, hi = theta;
      (p == 0 ? hi.mu : p == 1 ? hi.r : hi.c) += h;
      (p == 0 ? lo.mu : p == 1 ? lo.r : lo.c) -= h;
      const double df = (pmf_closed(j, hi, T) - pmf_closed(j, lo, T)) / (2.0 * h);
      const double fj = pmf_closed(j, theta, T);
      if (fj < kLogFloor) continue;
      comp += df * (static_cast<double>(counts.m[j]) - n * fj) / fj;
    }
    out.value[p] = comp;
  }
  return out;
}

std::pair<double, double> f_zero_and_plus(const ModelParams& theta, int n_visits) {
  const double f0 = pmf_closed(0, theta, n_visits);
  return {f0, 1.0 - f0};
}

OccupancyRates derived_occupancy(const ModelParams& theta, int n_visits) {
  theta.require_valid();
  if (n_visits < 1) throw std::invalid_argument("n_visits must be >= 1");
  OccupancyRates rates;
  rates.per_visit = 1.0 - std::exp(-theta.mu);
  rates.any_visit =
      1.0 - std::exp(-theta.mu - (n_visits - 1) * theta.d() * theta.mu);
  return rates;
}

OccurrenceMoments marginal_moments(const ModelParams& theta, int n_visits) {
  theta.require_valid();
  if (n_visits < 1) throw std::invalid_argument("n_visits must be >= 1");
  OccurrenceMoments mom;
  const double p = 1.0 - std::exp(-theta.mu * theta.r);
  mom.ey = n_visits * p;
  double s = 0.0;
  for (int y = 1; y <= n_visits; ++y) {
    s += static_cast<double>(y) * static_cast<double>(y) * pmf_closed(y, theta, n_visits);
  }
  mom.ey2 = s;
  return mom;
}

}  // namespace occmix
