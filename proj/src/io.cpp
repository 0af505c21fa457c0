#include "occmix/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace occmix {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ParseError(name + ":" + std::to_string(line) + ": " + msg);
}

bool is_binary_token(const std::string& t) { return t == "0" || t == "1"; }

double parse_number(const std::string& name, int line, const std::string& t) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) fail(name, line, "malformed number '" + t + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(name, line, "malformed number '" + t + "'");
  }
}

long long parse_nonneg_int(const std::string& name, int line, const std::string& t) {
  const double v = parse_number(name, line, t);
  if (v < 0 || v != std::floor(v)) fail(name, line, "expected a nonnegative integer, got '" + t + "'");
  return static_cast<long long>(v);
}

Dataset parse_counts(const std::vector<std::pair<int, std::string>>& lines,
                     const std::string& name) {
  if (lines.empty()) throw ParseError(name + ": empty counts file");
  if (lower(lines[0].second) != "y,count" && lower(lines[0].second) != "y, count")
    fail(name, lines[0].first, "counts format requires a 'y,count' header");

  std::vector<long long> by_y;
  std::vector<bool> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [ln, text] = lines[i];
    const auto tok = split_csv(text);
    if (tok.size() != 2) fail(name, ln, "expected 'y,count'");
    const long long y = parse_nonneg_int(name, ln, tok[0]);
    const long long cnt = parse_nonneg_int(name, ln, tok[1]);
    if (y > 1000) fail(name, ln, "occurrence count implausibly large");
    if (static_cast<std::size_t>(y) >= by_y.size()) {
      by_y.resize(y + 1, 0);
      seen.resize(y + 1, false);
    }
    if (seen[y]) fail(name, ln, "duplicate row for y=" + std::to_string(y));
    seen[y] = true;
    by_y[y] = cnt;
  }
  if (by_y.size() < 2) throw ParseError(name + ": counts need rows for y = 0..T with T >= 1");
  for (std::size_t y = 0; y < seen.size(); ++y)
    if (!seen[y]) throw ParseError(name + ": missing row for y=" + std::to_string(y));

  Dataset ds;
  ds.from_matrix = false;
  ds.counts.n_visits = static_cast<int>(by_y.size()) - 1;
  ds.counts.m = by_y;
  long long n = 0;
  for (long long v : by_y) n += v;
  if (n < 1) throw ParseError(name + ": zero sites");
  ds.counts.n_sites = static_cast<int>(n);
  ds.counts.require_valid();
  return ds;
}

Dataset parse_matrix(const std::vector<std::pair<int, std::string>>& lines,
                     const std::string& name) {
  if (lines.empty()) throw ParseError(name + ": empty matrix file");

  std::size_t first = 0;
  {
    const auto tok = split_csv(lines[0].second);
    const bool all_binary =
        std::all_of(tok.begin(), tok.end(), [](const std::string& t) { return is_binary_token(t); });
    if (!all_binary) first = 1;  // header row
    if (first == 1 && lines.size() == 1)
      fail(name, lines[0].first, "matrix file contains only a header");
  }

  DetectionMatrix dm;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto& [ln, text] = lines[i];
    const auto tok = split_csv(text);
    if (dm.n_visits == 0) {
      dm.n_visits = static_cast<int>(tok.size());
      if (dm.n_visits < 1) fail(name, ln, "empty row");
    } else if (static_cast<int>(tok.size()) != dm.n_visits) {
      fail(name, ln,
           "row has " + std::to_string(tok.size()) + " columns, expected " +
               std::to_string(dm.n_visits));
    }
    for (const auto& t : tok) {
      if (!is_binary_token(t)) fail(name, ln, "matrix entries must be 0 or 1, got '" + t + "'");
      dm.cells.push_back(t == "1" ? 1 : 0);
    }
    ++dm.n_sites;
  }
  Dataset ds;
  ds.from_matrix = true;
  ds.counts = dm.to_counts();
  return ds;
}

}  // namespace

Dataset parse_dataset(std::istream& in, DataFormat format, const std::string& name) {
  std::vector<std::pair<int, std::string>> lines;
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string t = trim(raw);
    if (t.empty()) continue;
    lines.emplace_back(ln, t);
  }
  if (lines.empty()) throw ParseError(name + ": empty file");

  if (format == DataFormat::autodetect) {
    const std::string head = lower(lines[0].second);
    format = (head == "y,count" || head == "y, count") ? DataFormat::counts : DataFormat::matrix;
  }
  return format == DataFormat::counts ? parse_counts(lines, name) : parse_matrix(lines, name);
}

Dataset read_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_dataset(in, format, path);
}

void write_matrix_csv(const DetectionMatrix& dm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (int i = 0; i < dm.n_sites; ++i) {
    for (int j = 0; j < dm.n_visits; ++j) {
      if (j) out << ',';
      out << static_cast<int>(dm.at(i, j));
    }
    out << '\n';
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ModelSpec model_spec_from_name(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "nmix") return ModelSpec::nmix();
  if (n == "ncmix") return ModelSpec::ncmix();
  if (n == "zib") return ModelSpec::zib();
  if (n == "zin") return ModelSpec::zin();
  if (n == "zinc") return ModelSpec::zinc();
  throw ParseError("unknown model '" + name + "' (expected nmix, ncmix, zib, zin or zinc)");
}

namespace {

std::vector<double> parse_double_list(const std::string& name, int ln, const std::string& val) {
  std::vector<double> out;
  for (const auto& t : split_csv(val)) {
    if (t.empty()) fail(name, ln, "empty list entry");
    out.push_back(parse_number(name, ln, t));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& name, int ln, const std::string& val) {
  std::vector<int> out;
  for (const auto& t : split_csv(val)) {
    const long long v = parse_nonneg_int(name, ln, t);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in, const std::string& name) {
  StudyConfig cfg;
  bool models_set = false;
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, ln, "expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) fail(name, ln, "missing value for '" + key + "'");

    if (key == "mu") {
      cfg.mu = parse_double_list(name, ln, val);
      for (double v : cfg.mu)
        if (!(v > 0)) fail(name, ln, "mu values must be positive");
    } else if (key == "r") {
      cfg.r = parse_double_list(name, ln, val);
      for (double v : cfg.r)
        if (!(v > 0 && v <= 1)) fail(name, ln, "r values must be in (0,1]");
    } else if (key == "c") {
      cfg.c = parse_double_list(name, ln, val);
      for (double v : cfg.c)
        if (v < 0 || v > 1) fail(name, ln, "c values must be in [0,1]");
    } else if (key == "psi") {
      cfg.psi = parse_double_list(name, ln, val);
      for (double v : cfg.psi)
        if (v < 0 || v > 1) fail(name, ln, "psi values must be in [0,1]");
    } else if (key == "n") {
      cfg.n_sites = parse_int_list(name, ln, val);
      for (int v : cfg.n_sites)
        if (v < 1) fail(name, ln, "n must be >= 1");
    } else if (key == "t") {
      cfg.n_visits = parse_int_list(name, ln, val);
      for (int v : cfg.n_visits)
        if (v < 1) fail(name, ln, "T must be >= 1");
    } else if (key == "replicates") {
      const auto v = parse_int_list(name, ln, val);
      if (v.size() != 1 || v[0] < 1) fail(name, ln, "replicates must be a single integer >= 1");
      cfg.replicates = v[0];
    } else if (key == "models") {
      cfg.models.clear();
      try {
        for (const auto& t : split_csv(val)) cfg.models.push_back(model_spec_from_name(t));
      } catch (const ParseError& e) {
        fail(name, ln, e.what());
      }
      models_set = true;
    } else {
      fail(name, ln, "unknown key '" + key + "'");
    }
  }
  if (!models_set || cfg.models.empty())
    throw ParseError(name + ": 'models' must list at least one model");

  const bool any_zi = std::any_of(cfg.models.begin(), cfg.models.end(),
                                  [](const ModelSpec& m) { return m.zero_inflated(); });
  if (any_zi && cfg.psi.empty())
    throw ParseError(name + ": zero-inflated models require 'psi' in the configuration");
  return cfg;
}

StudyConfig read_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_study_config(in, path);
}

std::vector<StudyCell> expand_grid(const StudyConfig& config) {
  std::vector<StudyCell> cells;
  const std::vector<std::optional<double>> psis =
      config.psi.empty()
          ? std::vector<std::optional<double>>{std::nullopt}
          : [&] {
              std::vector<std::optional<double>> v;
              for (double p : config.psi) v.emplace_back(p);
              return v;
            }();
  for (int n : config.n_sites)
    for (int T : config.n_visits)
      for (double mu : config.mu)
        for (double r : config.r)
          for (double c : config.c)
            for (const auto& psi : psis) {
              StudyCell cell;
              cell.config.theta = ModelParams{mu, r, c};
              cell.config.psi = psi;
              cell.config.n_sites = n;
              cell.config.n_visits = T;
              cell.models = config.models;
              cell.n_replicates = config.replicates;
              cells.push_back(std::move(cell));
            }
  return cells;
}

void write_summary_csv(const StudySummary& summary, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "mu,r,c,psi,n,T,model,parameter,med,med_se,mad,cp,fail_rate\n";
  for (const auto& row : summary) {
    out << format_double(row.mu) << ',' << format_double(row.r) << ',' << format_double(row.c)
        << ',' << (row.psi ? format_double(*row.psi) : "") << ',' << row.n_sites << ','
        << row.n_visits << ',' << row.model << ',' << row.parameter << ','
        << format_double(row.med) << ',' << format_double(row.med_se) << ','
        << format_double(row.mad) << ',' << format_double(row.cp) << ','
        << format_double(row.fail_rate) << '\n';
  }
}

void write_curves_csv(const StudySummary& summary, const std::string& path) {
  std::vector<const SummaryRow*> rows;
  rows.reserve(summary.size());
  for (const auto& r : summary) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const SummaryRow* a, const SummaryRow* b) {
    const auto key = [](const SummaryRow& r) {
      return std::tuple(r.model, r.parameter, r.mu, r.r, r.psi.value_or(-1.0),
                        r.n_sites, r.n_visits, r.c);
    };
    return key(*a) < key(*b);
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "model,parameter,mu,r,psi,n,T,c,med\n";
  for (const auto* row : rows) {
    out << row->model << ',' << row->parameter << ',' << format_double(row->mu) << ','
        << format_double(row->r) << ',' << (row->psi ? format_double(*row->psi) : "") << ','
        << row->n_sites << ',' << row->n_visits << ',' << format_double(row->c) << ','
        << format_double(row->med) << '\n';
  }
}

}  // namespace occmix
