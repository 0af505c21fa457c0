#include "occmix/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "occmix/rng.hpp"
#include "occmix/simulate.hpp"
#include "occmix/stats.hpp"

namespace occmix {

namespace {

bool nested(const ModelSpec& null_spec, const ModelSpec& alt_spec) {
  return (null_spec.family == Family::zib && alt_spec.family == Family::zinc) ||
         (null_spec.family == Family::zin && alt_spec.family == Family::zinc) ||
         (null_spec.family == Family::nmix && alt_spec.family == Family::ncmix);
}

// Start the alternative search at the null solution, nudged inside the open
// parameter box; this keeps the fitted alternative from landing below the
// null likelihood.
std::array<double, 4> embed_null_estimates(const ModelSpec& null_spec,
                                           const std::array<double, 4>& est) {
  std::array<double, 4> s = est;
  switch (null_spec.family) {
    case Family::zib:
      s[kR] = 0.9999;
      s[kMu] = est[kMu] / 0.9999;
      s[kC] = 1e-4;
      break;
    case Family::zin:
    case Family::nmix:
      s[kC] = 1.0 - 1e-6;
      break;
    default:
      break;
  }
  return s;
}

}  // namespace

WaldIntervals wald_ci(const FitResult& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
  WaldIntervals out;
  out.level = level;
  const double z = normal_quantile(0.5 + level / 2.0);
  const auto mask = fit.spec.free_mask();
  for (int i = 0; i < 4; ++i) {
    if (!mask[i]) continue;
    const double se = fit.std_err[i];
    if (!fit.se_ok || !std::isfinite(se)) continue;
    Interval iv;
    iv.lo = fit.estimates[i] - z * se;
    iv.hi = fit.estimates[i] + z * se;
    const double dom_lo = 0.0;
    const double dom_hi = i == kMu ? std::numeric_limits<double>::infinity() : 1.0;
    if (iv.lo < dom_lo) {
      iv.lo = dom_lo;
      iv.truncated_lo = true;
    }
    if (iv.hi > dom_hi) {
      iv.hi = dom_hi;
      iv.truncated_hi = true;
    }
    out.param[i] = iv;
  }
  return out;
}

LrStat lrt(const FitResult& null_fit, const FitResult& alt_fit) {
  if (!nested(null_fit.spec, alt_fit.spec))
    throw NotNestedError("lrt: " + null_fit.spec.name() + " is not nested in " +
                         alt_fit.spec.name());
  const double raw = 2.0 * (alt_fit.loglik - null_fit.loglik);
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

TestResult bootstrap_pvalue(const ModelSpec& null_spec, const ModelSpec& alt_spec,
                            const SurveyCounts& counts, int n_boot, std::uint64_t seed,
                            const OptimOptions& opts, int n_threads) {
  if (n_boot < 1) throw std::invalid_argument("bootstrap replicate count must be >= 1");
  if (!nested(null_spec, alt_spec))
    throw NotNestedError("bootstrap_pvalue: " + null_spec.name() + " is not nested in " +
                         alt_spec.name());
  counts.require_valid();

  TestResult res;
  res.null_spec = null_spec;
  res.alt_spec = alt_spec;

  OptimOptions null_opts = opts;
  null_opts.seed = derive_seed(seed, {0x0b5e0});
  res.null_fit = fit_model(null_spec, counts, null_opts);

  OptimOptions alt_opts = opts;
  alt_opts.seed = derive_seed(seed, {0x0b5e1});
  alt_opts.extra_starts.push_back(embed_null_estimates(null_spec, res.null_fit.estimates));
  res.alt_fit = fit_model(alt_spec, counts, alt_opts);

  res.lr_stat = lrt(res.null_fit, res.alt_fit).value;

  // replicate fits use a lighter multistart; each still polishes
  OptimOptions rep_opts = opts;
  rep_opts.n_starts = std::min(opts.n_starts, 3);

  const GenConfig null_gen{ModelParams{res.null_fit.mu(), res.null_fit.r(), res.null_fit.c()},
                           null_spec.zero_inflated()
                               ? std::optional<double>(res.null_fit.psi())
                               : std::nullopt,
                           counts.n_sites, counts.n_visits, 0};

  constexpr int kRetryCap = 5;
  std::vector<int> outcome(n_boot, 0);  // 1: LR* >= LR, 0: below, -1: failed

  auto replicate = [&](int b) {
    for (int attempt = 0; attempt < kRetryCap; ++attempt) {
      GenConfig g = null_gen;
      g.seed = derive_seed(seed, {0xb007, static_cast<std::uint64_t>(b),
                                  static_cast<std::uint64_t>(attempt)});
      const SurveyCounts cb = generate(g).to_counts();
      if (cb.m[0] == cb.n_sites) continue;
      try {
        OptimOptions no = rep_opts;
        no.seed = derive_seed(seed, {0xb0f0, static_cast<std::uint64_t>(b),
                                     static_cast<std::uint64_t>(attempt)});
        const FitResult nf = fit_model(null_spec, cb, no);
        OptimOptions ao = rep_opts;
        ao.seed = derive_seed(seed, {0xb0f1, static_cast<std::uint64_t>(b),
                                     static_cast<std::uint64_t>(attempt)});
        ao.extra_starts.push_back(embed_null_estimates(null_spec, nf.estimates));
        const FitResult af = fit_model(alt_spec, cb, ao);
        if (!nf.converged || !af.converged) continue;
        const double lr_b = std::max(0.0, 2.0 * (af.loglik - nf.loglik));
        outcome[b] = lr_b >= res.lr_stat ? 1 : 0;
        return;
      } catch (const std::exception&) {
      }
    }
    outcome[b] = -1;
  };

  n_threads = std::max(1, n_threads);
  if (n_threads == 1) {
    for (int b = 0; b < n_boot; ++b) replicate(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const int b = next.fetch_add(1);
          if (b >= n_boot) return;
          replicate(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  int n_ge = 0, n_ok = 0;
  for (int b = 0; b < n_boot; ++b) {
    if (outcome[b] < 0) {
      ++res.n_failed;
    } else {
      ++n_ok;
      n_ge += outcome[b];
    }
  }
  res.n_boot = n_ok;
  res.p_boot = (1.0 + n_ge) / (n_ok + 1.0);
  return res;
}

}  // namespace occmix
