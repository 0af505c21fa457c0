#pragma once

#include <functional>
#include <vector>

namespace occmix::optim {

using Objective = std::function<double(const std::vector<double>&)>;

struct SimplexOptions {
  int max_iter = 4000;
  double tol_fun_rel = 1e-10;  // relative spread of simplex values
  double tol_x = 1e-8;         // max coordinate spread of the simplex
  double init_step = 0.4;
};

struct MinimizeResult {
  std::vector<double> x;
  double fval = 0.0;
  int n_iter = 0;
  bool converged = false;
};

// Derivative-free simplex search (Nelder-Mead).
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const SimplexOptions& opts = {});

struct PolishOptions {
  int max_iter = 60;
  double fd_step = 1e-5;     // relative finite-difference step
  double tol_step = 1e-10;   // stop when the Newton step is this small
  double tol_fun = 1e-13;    // or the improvement is this small
};

// Damped Newton refinement with central-difference gradient and Hessian.
// Intended for small dimensions after a simplex search has located the basin.
MinimizeResult newton_polish(const Objective& f, std::vector<double> x0, double f0,
                             const PolishOptions& opts = {});

// Invert a symmetric positive definite matrix (row-major, n x n) via
// Cholesky factorization. Returns false when the matrix is not positive
// definite; `inv` is left unspecified in that case.
bool spd_inverse(const std::vector<double>& a, int n, std::vector<double>& inv);

}  // namespace occmix::optim
