// Command-line front end: fit occupancy models to detection/non-detection
// data, run bootstrap likelihood-ratio tests, generate data, and drive
// simulation studies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "occmix/inference.hpp"
#include "occmix/io.hpp"
#include "occmix/report.hpp"
#include "occmix/simulate.hpp"

namespace {

constexpr int kExitParseError = 2;
constexpr int kExitDegenerateData = 3;
constexpr int kExitNoConvergence = 4;

occmix::DataFormat parse_format(const std::string& s) {
  if (s == "matrix") return occmix::DataFormat::matrix;
  if (s == "counts") return occmix::DataFormat::counts;
  return occmix::DataFormat::autodetect;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

std::string curves_path_for(const std::string& out_path) {
  const auto dot = out_path.rfind('.');
  const auto slash = out_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out_path + "_curves";
  return out_path.substr(0, dot) + "_curves" + out_path.substr(dot);
}

struct FitArgs {
  std::string data_path;
  std::string format = "auto";
  std::string models = "nmix,ncmix,zib,zin,zinc";
  std::vector<std::string> fix;
  double level = 0.95;
  std::uint64_t seed = 1;
  bool json = false;
  std::string out_path;
};

int run_fit(const FitArgs& args) {
  const auto dataset = occmix::read_dataset(args.data_path, parse_format(args.format));

  std::optional<double> fixed_c;
  for (const auto& f : args.fix) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw occmix::ParseError("--fix expects NAME=VALUE, got '" + f + "'");
    const std::string name = f.substr(0, eq);
    if (name != "c")
      throw occmix::ParseError("--fix supports only c (got '" + name + "')");
    try {
      fixed_c = std::stod(f.substr(eq + 1));
    } catch (const std::exception&) {
      throw occmix::ParseError("--fix c: malformed value '" + f.substr(eq + 1) + "'");
    }
    if (*fixed_c < 0.0 || *fixed_c > 1.0) throw occmix::ParseError("--fix c: value must be in [0,1]");
  }

  std::vector<occmix::ModelSpec> specs;
  for (const auto& name : split_list(args.models)) {
    occmix::ModelSpec spec = occmix::model_spec_from_name(name);
    if (fixed_c) {
      if (spec.family == occmix::Family::ncmix) spec = occmix::ModelSpec::ncmix_fixed(*fixed_c);
      if (spec.family == occmix::Family::zinc) spec = occmix::ModelSpec::zinc_fixed(*fixed_c);
    }
    specs.push_back(spec);
  }
  if (specs.empty()) throw occmix::ParseError("--models: empty model list");

  occmix::OptimOptions opts;
  opts.seed = args.seed;
  const auto report = occmix::build_fit_report(dataset.counts, specs, opts, args.level);

  const std::string text =
      args.json ? occmix::report_to_json(report).dump(2) + "\n" : occmix::report_to_text(report);
  std::cout << text;
  if (!args.out_path.empty())
    write_text_file(args.out_path, occmix::report_to_json(report).dump(2) + "\n");

  const bool any_converged = std::any_of(report.fits.begin(), report.fits.end(),
                                         [](const occmix::FitResult& f) { return f.converged; });
  return any_converged ? 0 : kExitNoConvergence;
}

struct TestArgs {
  std::string data_path;
  std::string format = "auto";
  std::string null_name;
  int n_boot = 999;
  std::uint64_t seed = 1;
  double level = 0.95;
  int threads = 1;
  bool json = false;
};

int run_test(const TestArgs& args) {
  const auto dataset = occmix::read_dataset(args.data_path, parse_format(args.format));

  occmix::ModelSpec null_spec = occmix::model_spec_from_name(args.null_name);
  occmix::ModelSpec alt_spec = null_spec.family == occmix::Family::nmix
                                   ? occmix::ModelSpec::ncmix()
                                   : occmix::ModelSpec::zinc();
  if (null_spec.family != occmix::Family::zib && null_spec.family != occmix::Family::zin &&
      null_spec.family != occmix::Family::nmix)
    throw occmix::ParseError("--null must be zib, zin or nmix");

  occmix::OptimOptions opts;
  opts.seed = args.seed;
  const auto result = occmix::bootstrap_pvalue(null_spec, alt_spec, dataset.counts, args.n_boot,
                                               args.seed, opts, args.threads);
  if (!result.null_fit.converged || !result.alt_fit.converged) {
    std::cerr << "error: model fits on the observed data did not converge\n";
    return kExitNoConvergence;
  }
  std::cout << (args.json ? occmix::test_to_json(result).dump(2) + "\n"
                          : occmix::test_to_text(result, 1.0 - args.level));
  return 0;
}

struct SimArgs {
  double mu = 1.0, r = 0.5, c = 1.0;
  double psi = -1.0;  // <0: no zero-inflation
  int n = 100, T = 5;
  std::uint64_t seed = 1;
  std::string out_path;
};

int run_simulate(const SimArgs& args) {
  occmix::GenConfig cfg;
  cfg.theta = occmix::ModelParams{args.mu, args.r, args.c};
  if (args.psi >= 0.0) cfg.psi = args.psi;
  cfg.n_sites = args.n;
  cfg.n_visits = args.T;
  cfg.seed = args.seed;
  occmix::write_matrix_csv(occmix::generate(cfg), args.out_path);
  std::cout << "wrote " << args.out_path << " (" << args.n << " sites x " << args.T
            << " visits)\n";
  return 0;
}

struct StudyArgs {
  std::string config_path;
  std::string out_path;
  std::string curves_path;
  std::uint64_t seed = 1;
  int threads = 1;
  double level = 0.95;
};

int run_study(const StudyArgs& args) {
  const auto config = occmix::read_study_config(args.config_path);
  const auto cells = occmix::expand_grid(config);
  const auto summary = occmix::run_study(cells, args.seed, occmix::OptimOptions{}, args.threads,
                                         args.level);
  occmix::write_summary_csv(summary, args.out_path);
  const std::string curves =
      args.curves_path.empty() ? curves_path_for(args.out_path) : args.curves_path;
  occmix::write_curves_csv(summary, curves);
  std::cout << "summary: " << args.out_path << " (" << summary.size() << " rows)\n"
            << "curves:  " << curves << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occupancy-model fitting, testing and simulation"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit models to a dataset and report estimates, AIC");
  fit_cmd->add_option("--data", fit_args.data_path, "input CSV (detection matrix or counts)")
      ->required();
  fit_cmd->add_option("--format", fit_args.format, "input format")
      ->check(CLI::IsMember({"auto", "matrix", "counts"}));
  fit_cmd->add_option("--models", fit_args.models,
                      "comma-separated list from nmix,ncmix,zib,zin,zinc");
  fit_cmd->add_option("--fix", fit_args.fix, "fix a parameter, e.g. c=0.5");
  fit_cmd->add_option("--level", fit_args.level, "confidence level")
      ->check(CLI::Range(0.5, 0.9999));
  fit_cmd->add_option("--seed", fit_args.seed, "random-start seed");
  fit_cmd->add_flag("--json", fit_args.json, "print the JSON report instead of text");
  fit_cmd->add_option("--out", fit_args.out_path, "also write the JSON report to a file");

  TestArgs test_args;
  auto* test_cmd = app.add_subcommand("test", "bootstrap likelihood-ratio test of a submodel");
  test_cmd->add_option("--data", test_args.data_path, "input CSV")->required();
  test_cmd->add_option("--format", test_args.format, "input format")
      ->check(CLI::IsMember({"auto", "matrix", "counts"}));
  test_cmd->add_option("--null", test_args.null_name, "null model: zib, zin or nmix")->required();
  test_cmd->add_option("--boot", test_args.n_boot, "bootstrap replicates")
      ->check(CLI::PositiveNumber);
  test_cmd->add_option("--seed", test_args.seed, "bootstrap seed");
  test_cmd->add_option("--level", test_args.level, "confidence level")
      ->check(CLI::Range(0.5, 0.9999));
  test_cmd->add_option("--threads", test_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  test_cmd->add_flag("--json", test_args.json, "print JSON instead of text");

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "generate one detection matrix CSV");
  sim_cmd->add_option("--mu", sim_args.mu, "mean abundance")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--r", sim_args.r, "detection probability")->check(CLI::Range(1e-9, 1.0));
  sim_cmd->add_option("--c", sim_args.c, "community parameter")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--psi", sim_args.psi, "occupancy probability (omit for none)")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--n", sim_args.n, "number of sites")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--T", sim_args.T, "number of visits")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_args.seed, "generator seed");
  sim_cmd->add_option("--out", sim_args.out_path, "output CSV path")->required();

  StudyArgs study_args;
  auto* study_cmd = app.add_subcommand("study", "run a simulation study from a config file");
  study_cmd->add_option("--config", study_args.config_path, "study configuration file")
      ->required();
  study_cmd->add_option("--out", study_args.out_path, "summary CSV path")->required();
  study_cmd->add_option("--curves", study_args.curves_path,
                        "curves CSV path (default: derived from --out)");
  study_cmd->add_option("--seed", study_args.seed, "master seed");
  study_cmd->add_option("--threads", study_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--level", study_args.level, "confidence level for coverage")
      ->check(CLI::Range(0.5, 0.9999));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (test_cmd->parsed()) return run_test(test_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (study_cmd->parsed()) return run_study(study_args);
  } catch (const occmix::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const occmix::DegenerateDataError& e) {
    std::cerr << "error: degenerate data: " << e.what() << "\n";
    return kExitDegenerateData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
