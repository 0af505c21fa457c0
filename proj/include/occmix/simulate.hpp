#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occmix/fit.hpp"
#include "occmix/model_spec.hpp"
#include "occmix/types.hpp"

namespace occmix {

// Data-generating configuration. Per site: occupied with probability psi
// (always occupied when psi is absent); an occupied site draws a shared
// latent count K ~ Poisson(c mu) once and an independent M_j ~ Poisson(d mu)
// per visit, N_j = K + M_j, and is detected on visit j with probability
// 1 - (1-r)^(N_j).
struct GenConfig {
  ModelParams theta;
  std::optional<double> psi;
  int n_sites = 0;
  int n_visits = 0;
  std::uint64_t seed = 0;
};

// Deterministic given the seed; sites use independent substreams, so the
// result does not depend on evaluation order.
DetectionMatrix generate(const GenConfig& config);

// Same draw, keeping the latent per-visit abundances (row-major n x T).
struct LatentDraw {
  DetectionMatrix detections;
  std::vector<long> latent_counts;
};
LatentDraw generate_with_latent(const GenConfig& config);

// One grid point of a simulation study: a generating configuration, the
// models fitted to each replicate, and the replicate count. The config's own
// seed field is ignored; replicate streams derive from the study master seed.
struct StudyCell {
  GenConfig config;
  std::vector<ModelSpec> models;
  int n_replicates = 1;
};

// Per (cell, model, parameter) Monte Carlo summary. Aggregates cover the
// converged replicates only; cp additionally requires a usable standard
// error. NaN marks non-applicable entries.
struct SummaryRow {
  double mu, r, c;
  std::optional<double> psi;
  int n_sites, n_visits;
  std::string model;
  std::string parameter;  // "mu", "r", "c", "psi", or the product "mu_x_r"
  double med, med_se, mad, cp, fail_rate;
};

using StudySummary = std::vector<SummaryRow>;

// Runs every (cell, replicate): generate, fit each model, record estimates,
// standard errors and Wald coverage, then reduce to medians / scaled MAD /
// coverage / failure rate. Deterministic given master_seed and independent of
// the worker count.
StudySummary run_study(const std::vector<StudyCell>& cells, std::uint64_t master_seed,
                       const OptimOptions& opts = {}, int n_threads = 1,
                       double ci_level = 0.95);

}  // namespace occmix
