#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace occmix {

// Data are unusable for the requested estimator (e.g. no site has a detection).
struct DegenerateDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A closed-form statistic's preconditions do not hold for these counts.
struct InvalidStatisticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Likelihood-ratio test requested for a model pair that is not nested.
struct NotNestedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter vector of the correlated-mixture occupancy model.
//
// mu : mean abundance per site per visit (Poisson mean), mu > 0
// r  : per-individual detection probability, 0 < r <= 1
// c  : community parameter, the resident fraction of mean abundance shared
//      across visits (also the between-visit correlation of latent counts),
//      0 <= c <= 1
struct ModelParams {
  double mu = 1.0;
  double r = 0.5;
  double c = 1.0;

  // fraction of abundance redrawn independently each visit
  double d() const { return 1.0 - c; }

  bool valid() const {
    return mu > 0.0 && r > 0.0 && r <= 1.0 && c >= 0.0 && c <= 1.0;
  }
  void require_valid() const {
    if (!valid()) throw std::invalid_argument("ModelParams out of domain");
  }
};

// Zero-inflated extension: psi is the site occupancy probability.
struct ZIModelParams {
  ModelParams base;
  double psi = 1.0;

  bool valid() const { return base.valid() && psi >= 0.0 && psi <= 1.0; }
  void require_valid() const {
    if (!valid()) throw std::invalid_argument("ZIModelParams out of domain");
  }
};

// Sufficient statistics of a balanced detection/non-detection survey:
// m[j] = number of sites whose occurrence count (detections summed over
// visits) equals j, for j = 0..n_visits.
struct SurveyCounts {
  int n_sites = 0;
  int n_visits = 0;
  std::vector<long long> m;

  bool valid() const {
    if (n_sites < 1 || n_visits < 1) return false;
    if (static_cast<int>(m.size()) != n_visits + 1) return false;
    long long total = 0;
    for (long long v : m) {
      if (v < 0) return false;
      total += v;
    }
    return total == n_sites;
  }
  void require_valid() const {
    if (!valid()) throw std::invalid_argument("SurveyCounts inconsistent");
  }

  // sample mean of the per-site occurrence count
  double ybar() const {
    double s = 0.0;
    for (int j = 0; j <= n_visits; ++j) s += static_cast<double>(j) * static_cast<double>(m[j]);
    return s / static_cast<double>(n_sites);
  }
  // sample mean of the squared occurrence count
  double y2bar() const {
    double s = 0.0;
    for (int j = 0; j <= n_visits; ++j)
      s += static_cast<double>(j) * static_cast<double>(j) * static_cast<double>(m[j]);
    return s / static_cast<double>(n_sites);
  }
  long long n_positive() const { return static_cast<long long>(n_sites) - m[0]; }
};

// Binary detection history, one row per site, one column per visit.
struct DetectionMatrix {
  int n_sites = 0;
  int n_visits = 0;
  std::vector<std::uint8_t> cells;  // row-major, values 0/1

  std::uint8_t at(int site, int visit) const {
    return cells[static_cast<std::size_t>(site) * n_visits + visit];
  }
  void set(int site, int visit, std::uint8_t v) {
    cells[static_cast<std::size_t>(site) * n_visits + visit] = v;
  }

  int row_sum(int site) const {
    int s = 0;
    for (int j = 0; j < n_visits; ++j) s += at(site, j);
    return s;
  }

  SurveyCounts to_counts() const {
    SurveyCounts sc;
    sc.n_sites = n_sites;
    sc.n_visits = n_visits;
    sc.m.assign(static_cast<std::size_t>(n_visits) + 1, 0);
    for (int i = 0; i < n_sites; ++i) ++sc.m[row_sum(i)];
    return sc;
  }
};

}  // namespace occmix
