#include "occmix/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace occmix::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const Objective& f, const std::vector<double>& x) {
  const double v = f(x);
  return std::isnan(v) ? kInf : v;
}

// Solve A s = b for symmetric positive definite A via Cholesky.
// Returns false when A is not positive definite.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, int n,
                    std::vector<double>& out) {
  for (int j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (int k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    diag = std::sqrt(diag);
    a[j * n + j] = diag;
    for (int i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (int k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / diag;
    }
  }
  for (int i = 0; i < n; ++i) {
    double v = b[i];
    for (int k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  out.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    for (int k = i + 1; k < n; ++k) v -= a[k * n + i] * out[k];
    out[i] = v / a[i * n + i];
  }
  return true;
}

}  // namespace

bool spd_inverse(const std::vector<double>& a, int n, std::vector<double>& inv) {
  // Cholesky factor L with A = L L^T
  std::vector<double> l(a);
  for (int j = 0; j < n; ++j) {
    double diag = l[j * n + j];
    for (int k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    diag = std::sqrt(diag);
    l[j * n + j] = diag;
    for (int i = j + 1; i < n; ++i) {
      double v = l[i * n + j];
      for (int k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / diag;
    }
  }
  // solve A x = e_i column by column
  inv.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> y(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double v = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) v -= l[i * n + k] * y[k];
      y[i] = v / l[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = y[i];
      for (int k = i + 1; k < n; ++k) v -= l[k * n + i] * inv[k * n + col];
      inv[i * n + col] = v / l[i * n + i];
    }
  }
  return true;
}

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const SimplexOptions& opts) {
  const int n = static_cast<int>(x0.size());
  MinimizeResult res;
  if (n == 0) {
    res.x = x0;
    res.fval = guarded(f, x0);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fvals(n + 1);
  for (int i = 0; i < n; ++i) {
    simplex[i + 1][i] += (x0[i] != 0.0 ? opts.init_step * std::max(1.0, std::abs(x0[i]) * 0.25)
                                       : opts.init_step);
  }
  for (int i = 0; i <= n; ++i) fvals[i] = guarded(f, simplex[i]);

  std::vector<int> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fvals[a] < fvals[b]; });
    const int best = order[0], worst = order[n], second_worst = order[n - 1];

    // convergence: value spread and coordinate spread both small
    const double fspread = fvals[worst] - fvals[best];
    double xspread = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int j = 0; j < n; ++j)
        xspread = std::max(xspread, std::abs(simplex[order[i]][j] - simplex[best][j]));
    if (std::isfinite(fvals[best]) &&
        fspread <= opts.tol_fun_rel * (std::abs(fvals[best]) + 1e-12) &&
        xspread <= opts.tol_x) {
      res.converged = true;
      break;
    }

    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i)
        if (i != worst) s += simplex[i][j];
      centroid[j] = s / n;
    }

    auto blend = [&](std::vector<double>& dst, double coef) {
      for (int j = 0; j < n; ++j) dst[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
    };

    blend(xr, -1.0);
    const double fr = guarded(f, xr);
    if (fr < fvals[best]) {
      blend(xe, -2.0);
      const double fe = guarded(f, xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fvals[worst] = fe;
      } else {
        simplex[worst] = xr;
        fvals[worst] = fr;
      }
      continue;
    }
    if (fr < fvals[second_worst]) {
      simplex[worst] = xr;
      fvals[worst] = fr;
      continue;
    }
    blend(xc, fr < fvals[worst] ? -0.5 : 0.5);
    const double fc = guarded(f, xc);
    if (fc < std::min(fr, fvals[worst])) {
      simplex[worst] = xc;
      fvals[worst] = fc;
      continue;
    }
    // shrink toward best
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (int j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fvals[i] = guarded(f, simplex[i]);
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fvals[i] < fvals[best]) best = i;
  res.x = simplex[best];
  res.fval = fvals[best];
  res.n_iter = iter;
  return res;
}

MinimizeResult newton_polish(const Objective& f, std::vector<double> x0, double f0,
                             const PolishOptions& opts) {
  const int n = static_cast<int>(x0.size());
  MinimizeResult res;
  res.x = x0;
  res.fval = std::isfinite(f0) ? f0 : guarded(f, x0);
  if (n == 0 || !std::isfinite(res.fval)) {
    res.converged = std::isfinite(res.fval);
    return res;
  }

  std::vector<double> grad(n), hess(n * n), step, xt(n), xp(n), xm(n);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    res.n_iter = iter + 1;
    bool fd_ok = true;

    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = opts.fd_step * std::max(1.0, std::abs(res.x[i]));

    std::vector<double> fpl(n), fmi(n);
    for (int i = 0; i < n && fd_ok; ++i) {
      xp = res.x;
      xm = res.x;
      xp[i] += h[i];
      xm[i] -= h[i];
      fpl[i] = guarded(f, xp);
      fmi[i] = guarded(f, xm);
      if (!std::isfinite(fpl[i]) || !std::isfinite(fmi[i])) fd_ok = false;
      grad[i] = (fpl[i] - fmi[i]) / (2.0 * h[i]);
      hess[i * n + i] = (fpl[i] - 2.0 * res.fval + fmi[i]) / (h[i] * h[i]);
    }
    for (int i = 0; i < n && fd_ok; ++i) {
      for (int j = i + 1; j < n && fd_ok; ++j) {
        xt = res.x;
        xt[i] += h[i];
        xt[j] += h[j];
        const double fpp = guarded(f, xt);
        xt[j] -= 2.0 * h[j];
        const double fpm = guarded(f, xt);
        xt[i] -= 2.0 * h[i];
        const double fmm = guarded(f, xt);
        xt[j] += 2.0 * h[j];
        const double fmp = guarded(f, xt);
        if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmm) ||
            !std::isfinite(fmp)) {
          fd_ok = false;
          break;
        }
        const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        hess[i * n + j] = hess[j * n + i] = v;
      }
    }
    if (!fd_ok) break;  // stencil left the feasible region; keep current point

    // Levenberg damping until the (possibly indefinite) Hessian solves
    std::vector<double> neg_grad(n);
    for (int i = 0; i < n; ++i) neg_grad[i] = -grad[i];
    double damp = 0.0;
    bool solved = false;
    for (int attempt = 0; attempt < 12 && !solved; ++attempt) {
      std::vector<double> hd = hess;
      if (damp > 0.0)
        for (int i = 0; i < n; ++i) hd[i * n + i] += damp;
      solved = cholesky_solve(hd, neg_grad, n, step);
      if (!solved) damp = damp == 0.0 ? 1e-6 * (1.0 + std::abs(res.fval)) : damp * 10.0;
    }
    if (!solved) break;

    // backtracking line search
    double alpha = 1.0;
    double fnew = kInf;
    for (int ls = 0; ls < 30; ++ls) {
      for (int i = 0; i < n; ++i) xt[i] = res.x[i] + alpha * step[i];
      fnew = guarded(f, xt);
      if (fnew < res.fval) break;
      alpha *= 0.5;
    }
    if (!(fnew < res.fval)) {
      res.converged = true;  // no descent direction improves: stationary
      break;
    }

    double step_norm = 0.0;
    for (int i = 0; i < n; ++i) step_norm = std::max(step_norm, std::abs(alpha * step[i]));
    const double gain = res.fval - fnew;
    res.x = xt;
    res.fval = fnew;
    if (step_norm < opts.tol_step || gain < opts.tol_fun * (std::abs(fnew) + 1.0)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace occmix::optim
