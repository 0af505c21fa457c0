#include "occmix/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "occmix/optim.hpp"
#include "occmix/pmf.hpp"
#include "occmix/rng.hpp"

namespace occmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logit(double v) { return std::log(v / (1.0 - v)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double transform_lo(int pi) { return pi == kMu ? std::log(kMuLo) : logit(kProbLo); }
double transform_hi(int pi) { return pi == kMu ? std::log(kMuHi) : logit(kProbHi); }

double to_unconstrained(int pi, double v) {
  v = pi == kMu ? std::clamp(v, kMuLo, kMuHi) : std::clamp(v, kProbLo, kProbHi);
  return pi == kMu ? std::log(v) : logit(v);
}

double from_unconstrained(int pi, double x) {
  x = std::clamp(x, transform_lo(pi), transform_hi(pi));
  return pi == kMu ? std::exp(x) : expit(x);
}

// Objective over the transformed free coordinates. `conditional` restricts
// the likelihood to the positive cells and drops psi from the coordinates.
struct Problem {
  ModelSpec spec;
  const SurveyCounts* counts = nullptr;
  std::vector<int> free_idx;
  bool conditional = false;

  static Problem make(const ModelSpec& spec, const SurveyCounts& counts, bool conditional) {
    Problem p;
    p.spec = spec;
    p.counts = &counts;
    p.conditional = conditional;
    const auto mask = spec.free_mask();
    for (int i = 0; i < 4; ++i) {
      if (!mask[i]) continue;
      if (conditional && i == kPsi) continue;
      p.free_idx.push_back(i);
    }
    return p;
  }

  std::array<double, 4> to_full(const std::vector<double>& x) const {
    std::array<double, 4> full = spec.fixed_values();
    full[kMu] = 1.0;  // overwritten below; mu is always free
    for (std::size_t i = 0; i < free_idx.size(); ++i)
      full[free_idx[i]] = from_unconstrained(free_idx[i], x[i]);
    if (conditional && spec.zero_inflated()) full[kPsi] = 1.0;
    return full;
  }

  std::vector<double> to_x(const std::array<double, 4>& full) const {
    std::vector<double> x(free_idx.size());
    for (std::size_t i = 0; i < free_idx.size(); ++i)
      x[i] = to_unconstrained(free_idx[i], full[free_idx[i]]);
    return x;
  }

  double neg_loglik(const std::vector<double>& x) const {
    const auto full = to_full(x);
    const ModelParams theta{full[kMu], full[kR], full[kC]};
    double ll;
    if (conditional) {
      ll = loglik_conditional(theta, *counts);
    } else if (spec.zero_inflated()) {
      ll = loglik_zi({theta, full[kPsi]}, *counts);
    } else {
      ll = loglik(theta, *counts);
    }
    return -ll;
  }
};

struct OptimOutcome {
  std::vector<double> x;
  double neg_ll = std::numeric_limits<double>::infinity();
  bool converged = false;
  int n_starts = 0;
};

OptimOutcome optimize(const Problem& prob, const std::vector<std::array<double, 4>>& starts,
                      const OptimOptions& opts) {
  optim::SimplexOptions sopts;
  sopts.max_iter = opts.simplex_max_iter;
  sopts.tol_fun_rel = opts.tol_rel_loglik;
  sopts.tol_x = opts.tol_param;

  auto obj = [&prob](const std::vector<double>& x) { return prob.neg_loglik(x); };

  OptimOutcome best;
  best.n_starts = static_cast<int>(starts.size());
  for (const auto& s : starts) {
    auto run = optim::nelder_mead(obj, prob.to_x(s), sopts);
    if (run.fval < best.neg_ll) {
      best.x = run.x;
      best.neg_ll = run.fval;
      best.converged = run.converged;
    }
  }
  if (opts.polish && !best.x.empty() && std::isfinite(best.neg_ll)) {
    auto pol = optim::newton_polish(obj, best.x, best.neg_ll);
    if (pol.fval <= best.neg_ll) {
      best.x = pol.x;
      best.neg_ll = pol.fval;
      best.converged = best.converged || pol.converged;
    }
  }
  return best;
}

void set_boundary_flags(FitResult& fr) {
  const auto mask = fr.spec.free_mask();
  for (int i = 0; i < 4; ++i) {
    if (!mask[i]) continue;
    const double v = fr.estimates[i];
    fr.at_boundary[i] = i == kMu ? (v <= 10.0 * kMuLo || v >= kMuHi / 10.0)
                                 : (v <= 10.0 * kProbLo || v >= 1.0 - 10.0 * kProbLo);
  }
}

void finalize_result(FitResult& fr, const SurveyCounts& counts) {
  set_boundary_flags(fr);
  fr.aic = aic_value(fr.spec.n_free(), fr.loglik);
  fr.identifiability_warning = counts.n_visits < fr.spec.min_visits_identifiable();
  const auto ses = std_errors(fr.spec, counts, fr.estimates);
  fr.std_err = ses.se;
  fr.se_ok = ses.ok;
}

void require_estimable(const SurveyCounts& counts) {
  counts.require_valid();
  if (counts.m[0] == counts.n_sites)
    throw DegenerateDataError("all sites have zero detections; abundance is not estimable");
}

double joint_loglik(const ModelSpec& spec, const std::array<double, 4>& est,
                    const SurveyCounts& counts) {
  const ModelParams theta{est[kMu], est[kR], est[kC]};
  return spec.zero_inflated() ? loglik_zi({theta, est[kPsi]}, counts) : loglik(theta, counts);
}

}  // namespace

double aic_value(int n_free, double loglik) { return 2.0 * n_free - 2.0 * loglik; }

std::vector<std::array<double, 4>> multistart_points(const ModelSpec& spec,
                                                     const SurveyCounts& counts,
                                                     const OptimOptions& opts) {
  const int T = counts.n_visits;
  const double n = static_cast<double>(counts.n_sites);
  const double m0 = static_cast<double>(counts.m[0]);

  const double p_hat = std::clamp(counts.ybar() / T, 1e-4, 1.0 - 1e-4);
  const double mur = -std::log1p(-p_hat);

  // per-visit detection frequency among sites with at least one detection
  double ybar_pos = counts.ybar();
  if (counts.n_positive() > 0) {
    double s = 0.0;
    for (int j = 1; j <= T; ++j) s += static_cast<double>(j) * static_cast<double>(counts.m[j]);
    ybar_pos = s / static_cast<double>(counts.n_positive());
  }
  const double p_pos = std::clamp(ybar_pos / T, 1e-4, 1.0 - 1e-4);
  const double mur_pos = -std::log1p(-p_pos);

  const double occ_frac = std::clamp((n - m0) / n, 1e-4, 1.0);
  const double psi0 =
      std::clamp(occ_frac / std::clamp(1.0 - std::pow(1.0 - p_pos, T), 0.05, 1.0), 0.02, 0.98);

  const auto moments = moment_estimators(counts);
  const auto fixed = spec.fixed_values();

  auto mk = [](double mu, double r, double c, double psi) {
    return std::array<double, 4>{std::clamp(mu, kMuLo, kMuHi), std::clamp(r, kProbLo, kProbHi),
                                 std::clamp(c, 0.0, 1.0), std::clamp(psi, kProbLo, kProbHi)};
  };

  std::vector<std::array<double, 4>> starts;
  const bool zi = spec.zero_inflated();
  const double base_mur = zi ? mur_pos : mur;

  switch (spec.family) {
    case Family::nmix:
    case Family::ncmix_fixed_c: {
      const double c0 = fixed[kC] > 0.0 ? fixed[kC] : 1.0;
      if (moments)
        starts.push_back(mk(moments->mu * c0, moments->r / c0, fixed[kC], 1.0));
      else
        starts.push_back(mk(base_mur / (0.5 * std::max(c0, 0.05)), 0.5, fixed[kC], 1.0));
      for (double r0 : {0.15, 0.5, 0.85})
        starts.push_back(mk(base_mur / r0, r0, fixed[kC], 1.0));
      break;
    }
    case Family::ncmix: {
      for (double c0 : {0.5, 0.1, 0.9}) {
        if (moments)
          starts.push_back(mk(moments->mu * c0, moments->r / c0, c0, 1.0));
        else
          starts.push_back(mk(base_mur / 0.4, 0.4, c0, 1.0));
      }
      starts.push_back(mk(base_mur / 0.1, 0.1, 0.3, 1.0));
      break;
    }
    case Family::zib: {
      starts.push_back(mk(mur_pos, 1.0, 0.0, psi0));
      starts.push_back(mk(2.0 * mur_pos, 1.0, 0.0, psi0));
      starts.push_back(mk(mur_pos, 1.0, 0.0, 0.5));
      starts.push_back(mk(0.5 * mur_pos, 1.0, 0.0, 0.9));
      break;
    }
    case Family::zin:
    case Family::zinc_fixed_c: {
      for (double r0 : {0.5, 0.15, 0.03})
        starts.push_back(mk(mur_pos / r0, r0, fixed[kC], psi0));
      starts.push_back(mk(mur_pos / 0.5, 0.5, fixed[kC], 0.9));
      break;
    }
    case Family::zinc: {
      for (double c0 : {0.5, 0.1, 0.9})
        starts.push_back(mk(mur_pos / 0.4, 0.4, c0, psi0));
      starts.push_back(mk(mur_pos / 0.05, 0.05, 0.05, psi0));
      break;
    }
  }

  // top up / trim to n_starts, ending with seeded random points
  Rng rng(derive_seed(opts.seed, {0xa11d, static_cast<std::uint64_t>(spec.family)}));
  while (static_cast<int>(starts.size()) < opts.n_starts) {
    const double r0 = rng.uniform(0.03, 0.97);
    const double c0 = spec.c_free() ? rng.uniform(0.03, 0.97) : fixed[kC];
    const double psi_r = zi ? rng.uniform(0.1, 0.95) : 1.0;
    const double mu0 = (base_mur / r0) * std::exp(rng.uniform(-1.2, 1.2));
    starts.push_back(mk(mu0, spec.family == Family::zib ? 1.0 : r0, c0, psi_r));
  }
  if (static_cast<int>(starts.size()) > opts.n_starts)
    starts.resize(static_cast<std::size_t>(opts.n_starts));

  for (const auto& s : opts.extra_starts) starts.push_back(s);
  return starts;
}

FitResult fit(const ModelSpec& spec, const SurveyCounts& counts, const OptimOptions& opts) {
  require_estimable(counts);

  FitResult fr;
  fr.spec = spec;
  fr.std_err.fill(kNaN);

  auto starts = multistart_points(spec, counts, opts);
  if (spec.zero_inflated()) {
    // seed the joint search with the two-stage solution
    try {
      const auto ts = fit_zi_conditional(spec, counts, opts);
      starts.push_back(ts.estimates);
    } catch (const DegenerateDataError&) {
    }
  }

  const auto prob = Problem::make(spec, counts, /*conditional=*/false);
  const auto out = optimize(prob, starts, opts);

  fr.estimates = prob.to_full(out.x);
  fr.loglik = -out.neg_ll;
  fr.converged = out.converged && std::isfinite(fr.loglik);
  fr.n_restarts_used = out.n_starts;
  finalize_result(fr, counts);
  return fr;
}

FitResult fit_zi_conditional(const ModelSpec& spec, const SurveyCounts& counts,
                             const OptimOptions& opts) {
  if (!spec.zero_inflated())
    throw std::invalid_argument("fit_zi_conditional requires a zero-inflated family");
  require_estimable(counts);

  FitResult fr;
  fr.spec = spec;
  fr.std_err.fill(kNaN);

  const auto prob = Problem::make(spec, counts, /*conditional=*/true);
  const auto starts = multistart_points(spec, counts, opts);
  const auto out = optimize(prob, starts, opts);

  fr.estimates = prob.to_full(out.x);
  const ModelParams theta{fr.estimates[kMu], fr.estimates[kR], fr.estimates[kC]};
  const auto [f0, fplus] = f_zero_and_plus(theta, counts.n_visits);

  const double n = static_cast<double>(counts.n_sites);
  const double pos_frac = static_cast<double>(counts.n_positive()) / n;
  double psi = fplus > 1e-12 ? pos_frac / fplus : 1.0;
  if (psi >= 1.0) {
    psi = 1.0;
    fr.at_boundary[kPsi] = true;
  }
  fr.estimates[kPsi] = std::max(psi, kProbLo);

  fr.loglik = joint_loglik(spec, fr.estimates, counts);
  fr.converged = out.converged && std::isfinite(fr.loglik);
  fr.n_restarts_used = out.n_starts;
  finalize_result(fr, counts);
  return fr;
}

FitResult fit_model(const ModelSpec& spec, const SurveyCounts& counts, const OptimOptions& opts) {
  if (!spec.zero_inflated()) return fit(spec, counts, opts);
  FitResult fr = fit_zi_conditional(spec, counts, opts);
  // The two-stage estimates coincide with the joint MLE only while the psi
  // ratio stays below one. Once it clamps, the conditional stage may sit on a
  // ridge the joint likelihood rejects, so rerun the joint search.
  if (fr.at_boundary[kPsi]) {
    const FitResult joint = fit(spec, counts, opts);
    if (joint.loglik > fr.loglik) return joint;
  }
  return fr;
}

DoubleVisitEstimates closed_form_double_visit(const SurveyCounts& counts, double c) {
  counts.require_valid();
  if (counts.n_visits != 2)
    throw std::invalid_argument("closed-form estimator requires a double-visit survey");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must be in (0,1]");

  const double n = static_cast<double>(counts.n_sites);
  const double m0 = static_cast<double>(counts.m[0]);
  const double m1 = static_cast<double>(counts.m[1]);
  if (m0 <= 0.0) throw InvalidStatisticError("m_0 = 0: z2 undefined");
  if (!(2.0 * m0 + m1 < 2.0 * n))
    throw InvalidStatisticError("no double detections: z1 <= 0");

  const double z1 = std::log(2.0 * n / (2.0 * m0 + m1));
  const double z2 = std::log(m0 / n);
  if (!(2.0 * z1 + z2 > 0.0))
    throw InvalidStatisticError("2 z1 + z2 <= 0: estimates outside the parameter space");

  return {c * z1 * z1 / (2.0 * z1 + z2), (2.0 * z1 + z2) / (c * z1)};
}

std::optional<MomentEstimates> moment_estimators_from_moments(double ybar, double y2bar,
                                                              int n_visits) {
  if (n_visits < 2) return std::nullopt;
  const double T = static_cast<double>(n_visits);
  const double p = ybar / T;
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;

  // g is strictly increasing in r; a root in (0,1] needs a sign change
  auto g = [&](double r) {
    return T * p + T * (T - 1.0) * (2.0 * p - 1.0 + std::pow(1.0 - p, 2.0 - r)) - y2bar;
  };
  const double lo = 1e-12, hi = 1.0;
  if (!(g(lo) < 0.0) || !(g(hi) >= 0.0)) return std::nullopt;

  double a = lo, b = hi;
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double mid = 0.5 * (a + b);
    (g(mid) < 0.0 ? a : b) = mid;
  }
  const double r = 0.5 * (a + b);
  return MomentEstimates{-std::log1p(-p) / r, r};
}

std::optional<MomentEstimates> moment_estimators(const SurveyCounts& counts) {
  counts.require_valid();
  return moment_estimators_from_moments(counts.ybar(), counts.y2bar(), counts.n_visits);
}

StdErrorResult std_errors(const ModelSpec& spec, const SurveyCounts& counts,
                          const std::array<double, 4>& estimates) {
  StdErrorResult out;
  out.se.fill(kNaN);

  const auto mask = spec.free_mask();
  std::vector<int> idx;
  for (int i = 0; i < 4; ++i)
    if (mask[i]) idx.push_back(i);
  const int k = static_cast<int>(idx.size());

  auto ll_at = [&](const std::vector<double>& x) {
    std::array<double, 4> full = estimates;
    for (int i = 0; i < k; ++i) full[idx[i]] = x[i];
    const ModelParams theta{full[kMu], full[kR], full[kC]};
    if (!theta.valid() || theta.r > 1.0) return kNegInf;
    if (spec.zero_inflated() && (full[kPsi] < 0.0 || full[kPsi] > 1.0)) return kNegInf;
    return joint_loglik(spec, full, counts);
  };

  std::vector<double> x0(k), h(k);
  for (int i = 0; i < k; ++i) {
    const double v = estimates[idx[i]];
    double hi = 1e-4 * std::max(std::abs(v), 0.01);
    if (idx[i] == kMu) {
      hi = std::min(hi, v / 2.0);
    } else {
      hi = std::min({hi, v / 2.0, (1.0 - v) / 2.0});
    }
    if (!(hi > 1e-12)) return out;  // estimate effectively on the boundary
    x0[i] = v;
    h[i] = hi;
  }

  const double f0 = ll_at(x0);
  if (!std::isfinite(f0)) return out;

  // negative Hessian by central differences
  std::vector<double> neg_h(k * k);
  std::vector<double> xt;
  for (int i = 0; i < k; ++i) {
    xt = x0;
    xt[i] = x0[i] + h[i];
    const double fp = ll_at(xt);
    xt[i] = x0[i] - h[i];
    const double fm = ll_at(xt);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return out;
    neg_h[i * k + i] = -((fp - 2.0 * f0 + fm) / (h[i] * h[i]));
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      xt = x0;
      xt[i] += h[i];
      xt[j] += h[j];
      const double fpp = ll_at(xt);
      xt[j] -= 2.0 * h[j];
      const double fpm = ll_at(xt);
      xt[i] -= 2.0 * h[i];
      const double fmm = ll_at(xt);
      xt[j] += 2.0 * h[j];
      const double fmp = ll_at(xt);
      if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmm) ||
          !std::isfinite(fmp))
        return out;
      const double v = -((fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]));
      neg_h[i * k + j] = neg_h[j * k + i] = v;
    }
  }

  std::vector<double> inv;
  if (!optim::spd_inverse(neg_h, k, inv)) return out;
  for (int i = 0; i < k; ++i) {
    const double vii = inv[i * k + i];
    if (!(vii > 0.0)) return out;
    out.se[idx[i]] = std::sqrt(vii);
  }
  out.ok = true;
  return out;
}

}  // namespace occmix
