#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "occmix/simulate.hpp"
#include "occmix/types.hpp"

namespace occmix {

// Input that cannot be parsed; the message carries "name:line:" context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DataFormat { autodetect, matrix, counts };

struct Dataset {
  SurveyCounts counts;
  bool from_matrix = false;
};

// Two accepted layouts:
//  - detection matrix: one row per site, comma-separated 0/1 values,
//    optional non-numeric header row;
//  - frequency table: header "y,count" then one row per occurrence count
//    0..T.
// Autodetection keys on the "y,count" header.
Dataset read_dataset(const std::string& path, DataFormat format = DataFormat::autodetect);
Dataset parse_dataset(std::istream& in, DataFormat format, const std::string& name);

void write_matrix_csv(const DetectionMatrix& dm, const std::string& path);

// Simulation-study configuration: "key = value" lines, '#' comments, values
// optionally comma-separated lists. Grid keys (mu, r, c, psi, n, T) expand as
// a cartesian product; models and replicates apply to every cell.
struct StudyConfig {
  std::vector<double> mu{1.0};
  std::vector<double> r{0.5};
  std::vector<double> c{1.0};
  std::vector<double> psi;  // empty: no zero-inflation component
  std::vector<int> n_sites{100};
  std::vector<int> n_visits{5};
  std::vector<ModelSpec> models;
  int replicates = 200;
};
StudyConfig parse_study_config(std::istream& in, const std::string& name);
StudyConfig read_study_config(const std::string& path);
std::vector<StudyCell> expand_grid(const StudyConfig& config);

void write_summary_csv(const StudySummary& summary, const std::string& path);
// Long-format median-estimate curves against c, for plotting.
void write_curves_csv(const StudySummary& summary, const std::string& path);

// Deterministic locale-independent formatting; NaN renders as an empty field.
std::string format_double(double v);

ModelSpec model_spec_from_name(const std::string& name);

}  // namespace occmix
