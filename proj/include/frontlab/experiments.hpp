#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "frontlab/front_factory.hpp"
#include "frontlab/lab_config.hpp"

namespace frontlab {

struct Verdict {
  std::string id;
  bool pass = false;
  std::string detail;  // the comparison that produced the verdict
};

/// Named CSV table.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string name;
  std::string config;   // serialized config
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<Verdict> verdicts;
  std::vector<Table> tables;
  std::string error;  // module error that stopped the run, if any

  /// No error, at least one verdict, all verdicts pass.
  bool passed() const;
  /// Measured quantity by key; NaN when absent.
  double value(const std::string& key) const;
  const Verdict* verdict(const std::string& id) const;
  const Table* table(const std::string& name) const;
};

std::string version_string();

/// Smoke or full preset for a registry entry. Keys set in `cfg.params`
/// override the preset.
ExperimentConfig preset_config(const std::string& name, const std::string& profile = "smoke");

/// Runs the named pipeline, writes its files under cfg.out_dir (when not
/// empty) and returns the report. Module errors end up in report.error.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// report.txt (flat key = value lines) plus one CSV per table.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Shortest round-trip decimal form, used for every CSV cell.
std::string format_csv_number(double x);
void write_table_csv(const Table& t, const std::filesystem::path& path, const std::string& header_comment = "");

// Building blocks shared with the CLI and the tests.

/// Coarse scan of [lo, hi] followed by Brent refinement around the best
/// sample. Returns (argmin, min).
std::pair<double, double> minimize_scan(const std::function<double(double)>& fn, double lo, double hi,
                                        int samples = 41);

/// min over s of sup_x |u(x) - phi_f(x - s)| on a 1D field.
std::pair<double, double> profile_distance_1d(const ScalarField& u, const ProfileSolution& p);

/// min over s of sup_x |u(x) - v(x - s)|, v sampled by cubic interpolation
/// (nodes whose shifted point leaves v's grid are skipped).
std::pair<double, double> self_shift_distance_1d(const ScalarField& u, const ScalarField& v, double lo, double hi);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Memoised conical_front on conical_grid(n, h).
const ConicalFront& cached_conical_front(const Nonlinearity& f, double alpha, double h, Eigen::Index n,
                                         double relax_time);

}  // namespace frontlab
