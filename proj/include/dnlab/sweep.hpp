#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnlab/collar.hpp"
#include "dnlab/fourier.hpp"
#include "dnlab/periods.hpp"
#include "dnlab/spectral.hpp"

namespace dnlab {

// Flat key=value experiment description. "eps=" and "mu=" may repeat to form
// the sweep lists; every other key appears at most once. Unknown keys are
// rejected.
struct ExperimentConfig {
  std::string family;           // torus-hole | disk-sanity | synthetic
  Complex tau_lat{0.0, 1.0};    // lattice modulus of the torus
  std::vector<double> eps;      // hole radii, strictly decreasing
  std::vector<double> mu_list;  // synthetic probe values, strictly increasing
  double h_target = 0.08;
  int N = 16;
  std::map<std::string, double> tolerances;  // residual, bcal_dev
  std::filesystem::path out = "out";
  bool cache = true;
  int workers = 1;

  // Named tolerance with its built-in default.
  double tolerance(const std::string& name) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

// 16 hex digits of the FNV-1a hash of the canonical serialization of the
// fields that determine the FEM artifacts. Stable across runs and platforms;
// independent of the order of lines in the source config.
std::string cache_key(const std::string& family, Complex tau_lat, double eps,
                      double h_target, int N);

// Everything one torus-hole sweep point produces. The FEM-derived pieces
// (dn, traces, interior periods, annulus modulus) come from the cache when a
// complete entry exists; the rest is recomputed, which is deterministic
// because the cached text formats round-trip doubles exactly.
struct TorusPointData {
  std::string key;
  bool from_cache = false;
  BoundaryOperator dn;
  double dn_distance = 0.0;  // to the flat-metric boundary symbol diag(|k|)
  SpectralData spectral;
  BoundaryFunction trace_a, trace_b;  // harmonic-form traces on the hole circle
  PeriodData periods;                 // coupling data, pre-reduction Siegel entries
  Eigen::Matrix2d bcal_interior;      // cross-check from starred line integrals
  double bcal_deviation = 0.0;        // entrywise gap between the two routes
  NormalizeResult reduced;
  Eigen::Matrix2cd siegel_raw, siegel_reduced;
  double modulus = 0.0;  // doubled-collar annulus modulus
};

TorusPointData compute_torus_point(const ExperimentConfig& cfg, double eps);

// Minimal line plot: fixed 800x600 frame, log10 x axis, one polyline with
// point markers. Pairs with non-finite or non-positive x are dropped.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<std::pair<double, double>>& points);

struct SweepResult {
  std::vector<DegenerationReport> rows;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> plots;
  std::string case_label;  // classification over the successful rows
  int n_points = 0;
  int n_failed = 0;  // rows whose flags carry an error marker

  // 0: all points succeeded; 2: some failed; 1: every point failed.
  int exit_code() const;
};

// Runs the configured family end to end and writes report.csv, the trend
// plots and classification.txt under the output directory. Per-point errors
// become rows with an "error=..." flag instead of aborting the sweep.
SweepResult run_sweep(const ExperimentConfig& cfg);

}  // namespace dnlab
