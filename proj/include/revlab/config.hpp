#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "revlab/experiments.hpp"

namespace revlab {

/// Run configuration. Text form is INI-like (see docs/config.md); to_text()
/// is canonical, so parse(to_text()) reproduces the config exactly.
struct RunConfig {
  // [profile]
  std::string profile = "nondeg";
  std::map<std::string, double> params;
  std::string curve_csv;  // alternative to a catalog name

  // [grid]
  int n = 1024;  // fixed-grid subcommands (spectrum, band-mass, dichotomy)
  int n_min = 1024;
  int n_max = 4096;
  double points = 8.0;
  Scheme scheme = Scheme::Spectral;

  // [sweep]
  double h_min = 1.0 / 800.0;
  double h_max = 1.0 / 50.0;
  int h_count = 9;
  double lambda_min = 10.0;
  double lambda_max = 300.0;
  int k_max = 20;

  // [bands] label = a, b
  std::vector<BandRegion> bands;

  // [window]
  double x_pad = 1.5;
  double xi_halfwidth = 0.5;
  double taper = 0.25;
  double theta = 0.5;
  double z_window = 0.05;

  // [tolerances]
  double crit_tol = 1e-8;
  int crit_cap = 64;
  int max_order = 10;
  int vanishing_degree = 6;
  double eps_accept = 0.2;
  double wavefront_threshold = 1e-4;
  double uniform_ratio = 10.0;

  // [output]
  std::string out_dir = "out";
  std::string format = "json";
  bool deterministic = true;

  RunConfig();

  static RunConfig parse(std::istream& in);
  static RunConfig parse_text(const std::string& text);
  static RunConfig load(const std::string& path);

  std::string to_text() const;
  /// Hex SHA-256 of to_text().
  std::string hash() const;
  /// Throws InputError naming the offending key.
  void validate() const;

  GeneratingCurve curve() const;
  std::vector<double> h_sweep() const;
  GridPolicy grid_policy() const;
  PhaseSpaceWindow window_for(const CriticalElement& elem) const;
  CriticalScanOptions scan_options() const;
  DichotomyOptions dichotomy_options() const;

  bool operator==(const RunConfig&) const;
};

std::vector<BandRegion> default_bands(double period);

}  // namespace revlab
