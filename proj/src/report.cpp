#include "occmix/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace occmix {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  if (std::isnan(v)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string est_se(double est, double se) {
  std::string s = fmt(est, "%.4g");
  s += " (";
  s += std::isnan(se) ? "-" : fmt(se, "%.3g");
  s += ")";
  return s;
}

bool has_occupied_probability(const FitResult& fr) {
  // comparable occupancy for the closed-population zero-inflated fit, whose
  // psi also counts occupied-but-empty sites: psi * (1 - exp(-mu))
  return fr.spec.family == Family::zin;
}

double occupied_probability(const FitResult& fr) {
  return fr.psi() * (1.0 - std::exp(-fr.mu()));
}

}  // namespace

std::vector<std::size_t> FitReport::aic_ranking() const {
  std::vector<std::size_t> order(fits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fits[a].converged != fits[b].converged) return fits[a].converged;
    return fits[a].aic < fits[b].aic;
  });
  return order;
}

FitReport build_fit_report(const SurveyCounts& counts, const std::vector<ModelSpec>& models,
                           const OptimOptions& opts, double ci_level) {
  counts.require_valid();
  if (counts.m[0] == counts.n_sites)
    throw DegenerateDataError("all sites have zero detections");

  FitReport report;
  report.counts = counts;
  report.ci_level = ci_level;

  for (const auto& spec : models) {
    if (counts.n_visits < spec.min_visits_identifiable()) {
      report.warnings.push_back(spec.name() + ": parameters may not be identifiable with T=" +
                                std::to_string(counts.n_visits) +
                                " (needs T>=" + std::to_string(spec.min_visits_identifiable()) +
                                "); fit attempted anyway");
    }
    const FitResult fr = fit_model(spec, counts, opts);
    if (!fr.converged) report.warnings.push_back(spec.name() + ": optimization did not converge");
    for (int p = 0; p < 4; ++p) {
      if (fr.at_boundary[p])
        report.warnings.push_back(spec.name() + ": " + param_name(p) +
                                  " estimate at the parameter bound");
    }
    if (!fr.se_ok)
      report.warnings.push_back(spec.name() +
                                ": observed information not positive definite; no standard errors");
    report.intervals.push_back(wald_ci(fr, ci_level));
    report.fits.push_back(fr);
  }
  return report;
}

nlohmann::ordered_json report_to_json(const FitReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "occmix/1";

  nlohmann::ordered_json ds;
  ds["n_sites"] = report.counts.n_sites;
  ds["n_visits"] = report.counts.n_visits;
  ds["m"] = report.counts.m;
  ds["sample_occupancy"] = report.sample_occupancy();
  j["dataset"] = ds;
  j["ci_level"] = report.ci_level;

  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.fits.size(); ++i) {
    const FitResult& fr = report.fits[i];
    const auto mask = fr.spec.free_mask();
    nlohmann::ordered_json m;
    m["model"] = fr.spec.name();
    m["converged"] = fr.converged;
    m["loglik"] = fr.loglik;
    m["k"] = fr.spec.n_free();
    m["aic"] = fr.aic;

    nlohmann::ordered_json est, se, ci, fixed;
    for (int p = 0; p < 4; ++p) {
      if (p == kPsi && !fr.spec.zero_inflated() && !mask[p]) continue;
      if (mask[p]) {
        est[param_name(p)] = fr.estimates[p];
        if (fr.se_ok && std::isfinite(fr.std_err[p])) se[param_name(p)] = fr.std_err[p];
        if (const auto& iv = report.intervals[i].param[p]) {
          ci[param_name(p)] = {{"lo", iv->lo},
                               {"hi", iv->hi},
                               {"truncated", iv->truncated_lo || iv->truncated_hi}};
        }
      } else {
        fixed[param_name(p)] = fr.estimates[p];
      }
    }
    m["estimates"] = est;
    m["std_errors"] = se;
    m["ci"] = ci;
    m["fixed"] = fixed;

    nlohmann::ordered_json derived;
    if (mask[kMu] && mask[kR]) derived["mu_x_r"] = fr.mu() * fr.r();
    if (fr.spec.family == Family::nmix) derived["psi"] = 1.0 - std::exp(-fr.mu());
    if (has_occupied_probability(fr)) derived["occupied_probability"] = occupied_probability(fr);
    m["derived"] = derived;

    nlohmann::ordered_json boundary = nlohmann::ordered_json::array();
    for (int p = 0; p < 4; ++p)
      if (fr.at_boundary[p]) boundary.push_back(param_name(p));
    m["boundary"] = boundary;
    models.push_back(std::move(m));
  }
  j["models"] = models;

  nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
  for (std::size_t idx : report.aic_ranking()) ranking.push_back(report.fits[idx].spec.name());
  j["aic_ranking"] = ranking;
  j["warnings"] = report.warnings;
  return j;
}

std::string report_to_text(const FitReport& report) {
  std::ostringstream out;
  const auto& c = report.counts;
  out << "dataset: n=" << c.n_sites << " T=" << c.n_visits << " m=[";
  for (int jx = 0; jx <= c.n_visits; ++jx) out << (jx ? "," : "") << c.m[jx];
  char occ[32];
  std::snprintf(occ, sizeof occ, "%.4f", report.sample_occupancy());
  out << "] sample_occupancy=" << occ << "\n\n";

  out << "model        mu              r               c               psi             "
         "loglik      AIC\n";
  for (std::size_t i = 0; i < report.fits.size(); ++i) {
    const FitResult& fr = report.fits[i];
    const auto mask = fr.spec.free_mask();
    char line[256];
    auto cell = [&](int p) {
      if (mask[p]) return est_se(fr.estimates[p], fr.se_ok ? fr.std_err[p] : std::nan(""));
      if (p == kPsi && !fr.spec.zero_inflated()) return std::string("-");
      return fmt(fr.estimates[p], "%.4g") + "*";
    };
    std::snprintf(line, sizeof line, "%-12s %-15s %-15s %-15s %-15s %-11s %s",
                  fr.spec.name().c_str(), cell(kMu).c_str(), cell(kR).c_str(),
                  cell(kC).c_str(), cell(kPsi).c_str(), fmt(fr.loglik, "%.4f").c_str(),
                  fmt(fr.aic, "%.1f").c_str());
    out << line << (fr.converged ? "" : "   [not converged]") << "\n";
  }
  out << "(* fixed value; standard errors in parentheses)\n";

  bool any_derived = false;
  for (const auto& fr : report.fits) {
    const auto mask = fr.spec.free_mask();
    if ((mask[kMu] && mask[kR]) || fr.spec.family == Family::nmix ||
        has_occupied_probability(fr)) {
      any_derived = true;
      break;
    }
  }
  if (any_derived) {
    out << "\nderived:\n";
    for (const auto& fr : report.fits) {
      const auto mask = fr.spec.free_mask();
      if (mask[kMu] && mask[kR])
        out << "  " << fr.spec.name() << " mu*r = " << fmt(fr.mu() * fr.r(), "%.4g") << "\n";
      if (fr.spec.family == Family::nmix)
        out << "  " << fr.spec.name()
            << " psi = 1-exp(-mu) = " << fmt(1.0 - std::exp(-fr.mu()), "%.4g") << "\n";
      if (has_occupied_probability(fr))
        out << "  " << fr.spec.name()
            << " occupied probability psi*(1-exp(-mu)) = " << fmt(occupied_probability(fr), "%.4g")
            << "\n";
    }
  }

  out << "\nAIC ranking:";
  for (std::size_t idx : report.aic_ranking()) out << " " << report.fits[idx].spec.name();
  out << "\n";

  if (!report.warnings.empty()) {
    out << "\nwarnings:\n";
    for (const auto& w : report.warnings) out << "  - " << w << "\n";
  }
  return out.str();
}

nlohmann::ordered_json test_to_json(const TestResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = "occmix/1";
  j["null_model"] = result.null_spec.name();
  j["alt_model"] = result.alt_spec.name();
  j["lr_stat"] = result.lr_stat;
  j["n_boot"] = result.n_boot;
  j["n_failed"] = result.n_failed;
  j["p_boot"] = result.p_boot;
  j["note"] = result.p_asymptotic_note;
  j["null_loglik"] = result.null_fit.loglik;
  j["alt_loglik"] = result.alt_fit.loglik;
  return j;
}

std::string test_to_text(const TestResult& result, double alpha) {
  std::ostringstream out;
  const char* hypothesis = result.null_spec.family == Family::zib ? "c=0" : "c=1";
  out << "test: null=" << result.null_spec.name() << " (" << hypothesis
      << ") vs alt=" << result.alt_spec.name() << "\n";
  out << "LR = " << fmt(result.lr_stat, "%.4f") << "\n";
  out << "bootstrap replicates: " << result.n_boot;
  if (result.n_failed > 0) out << " (failed: " << result.n_failed << ")";
  out << "\n";
  out << "p = " << fmt(result.p_boot, "%.6g") << "\n";
  out << "note: " << result.p_asymptotic_note << "\n";
  out << "conclusion: "
      << (result.p_boot <= alpha ? std::string("reject ") + hypothesis
                                 : std::string("fail to reject ") + hypothesis)
      << " at level " << fmt(alpha, "%.3g") << "\n";
  return out.str();
}

}  // namespace occmix
