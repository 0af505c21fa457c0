#include "occmix/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "occmix/rng.hpp"
#include "occmix/stats.hpp"

namespace occmix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_config(const GenConfig& config) {
  config.theta.require_valid();
  if (config.n_sites < 1 || config.n_visits < 1)
    throw std::invalid_argument("n_sites and n_visits must be >= 1");
  if (config.psi && (*config.psi < 0.0 || *config.psi > 1.0))
    throw std::invalid_argument("psi must be in [0,1]");
}

void draw_site(const GenConfig& config, int site, DetectionMatrix& dm, long* latent_row) {
  Rng rng(derive_seed(config.seed, {0x517e, static_cast<std::uint64_t>(site)}));
  const int T = config.n_visits;

  if (config.psi && !rng.bernoulli(*config.psi)) {
    for (int j = 0; j < T; ++j) {
      dm.set(site, j, 0);
      if (latent_row) latent_row[j] = 0;
    }
    return;
  }

  const double mu = config.theta.mu, r = config.theta.r;
  const long shared = rng.poisson(config.theta.c * mu);
  const double lambda_new = config.theta.d() * mu;
  for (int j = 0; j < T; ++j) {
    const long n_ij = shared + rng.poisson(lambda_new);
    const double detect_p = 1.0 - std::pow(1.0 - r, static_cast<double>(n_ij));
    dm.set(site, j, rng.bernoulli(detect_p) ? 1 : 0);
    if (latent_row) latent_row[j] = n_ij;
  }
}

}  // namespace

DetectionMatrix generate(const GenConfig& config) {
  check_config(config);
  DetectionMatrix dm;
  dm.n_sites = config.n_sites;
  dm.n_visits = config.n_visits;
  dm.cells.assign(static_cast<std::size_t>(config.n_sites) * config.n_visits, 0);
  for (int i = 0; i < config.n_sites; ++i) draw_site(config, i, dm, nullptr);
  return dm;
}

LatentDraw generate_with_latent(const GenConfig& config) {
  check_config(config);
  LatentDraw draw;
  draw.detections.n_sites = config.n_sites;
  draw.detections.n_visits = config.n_visits;
  draw.detections.cells.assign(static_cast<std::size_t>(config.n_sites) * config.n_visits, 0);
  draw.latent_counts.assign(static_cast<std::size_t>(config.n_sites) * config.n_visits, 0);
  for (int i = 0; i < config.n_sites; ++i)
    draw_site(config, i, draw.detections,
              draw.latent_counts.data() + static_cast<std::size_t>(i) * config.n_visits);
  return draw;
}

namespace {

struct RepRecord {
  bool converged = false;
  std::array<double, 4> est{};
  std::array<double, 4> se{};
  bool se_ok = false;
};

void summarize_parameter(StudySummary& out, const StudyCell& cell, const ModelSpec& model,
                         const std::vector<RepRecord>& reps, int param_index,
                         const std::string& param_label, double truth, double z) {
  std::vector<double> est, ses;
  int n_cov = 0, n_ci = 0, n_conv = 0;
  for (const auto& rec : reps) {
    if (!rec.converged) continue;
    ++n_conv;
    double v;
    if (param_index >= 0) {
      v = rec.est[param_index];
    } else {
      v = rec.est[kMu] * rec.est[kR];  // product summary
    }
    est.push_back(v);
    if (param_index >= 0 && rec.se_ok && std::isfinite(rec.se[param_index])) {
      const double se = rec.se[param_index];
      ses.push_back(se);
      ++n_ci;
      if (std::abs(rec.est[param_index] - truth) <= z * se) ++n_cov;
    }
  }

  SummaryRow row;
  row.mu = cell.config.theta.mu;
  row.r = cell.config.theta.r;
  row.c = cell.config.theta.c;
  row.psi = cell.config.psi;
  row.n_sites = cell.config.n_sites;
  row.n_visits = cell.config.n_visits;
  row.model = model.name();
  row.parameter = param_label;
  row.med = est.empty() ? kNaN : median(est);
  row.mad = est.empty() ? kNaN : scaled_mad(est);
  row.med_se = ses.empty() ? kNaN : median(std::move(ses));
  row.cp = n_ci > 0 ? static_cast<double>(n_cov) / n_ci : kNaN;
  row.fail_rate =
      1.0 - static_cast<double>(n_conv) / static_cast<double>(cell.n_replicates);
  out.push_back(std::move(row));
}

}  // namespace

StudySummary run_study(const std::vector<StudyCell>& cells, std::uint64_t master_seed,
                       const OptimOptions& opts, int n_threads, double ci_level) {
  if (cells.empty()) throw std::invalid_argument("run_study: no cells");
  for (const auto& cell : cells) {
    check_config(cell.config);
    if (cell.n_replicates < 1) throw std::invalid_argument("n_replicates must be >= 1");
    if (cell.models.empty()) throw std::invalid_argument("cell without models");
  }

  // slot[cell][model][replicate]
  std::vector<std::vector<std::vector<RepRecord>>> records(cells.size());
  std::vector<std::pair<int, int>> items;  // (cell index, replicate index)
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    records[ci].assign(cells[ci].models.size(),
                       std::vector<RepRecord>(cells[ci].n_replicates));
    for (int rep = 0; rep < cells[ci].n_replicates; ++rep)
      items.emplace_back(static_cast<int>(ci), rep);
  }

  auto work = [&](int ci, int rep) {
    GenConfig cfg = cells[ci].config;
    cfg.seed = derive_seed(master_seed, {0xda7a, static_cast<std::uint64_t>(ci),
                                         static_cast<std::uint64_t>(rep)});
    const SurveyCounts counts = generate(cfg).to_counts();
    for (std::size_t mi = 0; mi < cells[ci].models.size(); ++mi) {
      RepRecord& rec = records[ci][mi][rep];
      try {
        OptimOptions o = opts;
        o.seed = derive_seed(master_seed, {0xf17, static_cast<std::uint64_t>(ci),
                                           static_cast<std::uint64_t>(rep),
                                           static_cast<std::uint64_t>(mi)});
        const FitResult fr = fit_model(cells[ci].models[mi], counts, o);
        rec.converged = fr.converged;
        rec.est = fr.estimates;
        rec.se = fr.std_err;
        rec.se_ok = fr.se_ok;
      } catch (const std::exception&) {
        rec.converged = false;
      }
    }
  };

  n_threads = std::max(1, n_threads);
  if (n_threads == 1) {
    for (const auto& [ci, rep] : items) work(ci, rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= items.size()) return;
          work(items[i].first, items[i].second);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  const double z = normal_quantile(0.5 + ci_level / 2.0);
  StudySummary summary;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    const double truth[4] = {cell.config.theta.mu, cell.config.theta.r, cell.config.theta.c,
                             cell.config.psi.value_or(1.0)};
    for (std::size_t mi = 0; mi < cell.models.size(); ++mi) {
      const ModelSpec& model = cell.models[mi];
      const auto mask = model.free_mask();
      for (int p = 0; p < 4; ++p) {
        if (!mask[p]) continue;
        summarize_parameter(summary, cell, model, records[ci][mi], p, param_name(p),
                            truth[p], z);
      }
      if (mask[kMu] && mask[kR]) {
        summarize_parameter(summary, cell, model, records[ci][mi], -1, "mu_x_r",
                            truth[kMu] * truth[kR], z);
      }
    }
  }
  return summary;
}

}  // namespace occmix
