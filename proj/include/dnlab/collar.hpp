#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dnlab/theta.hpp"

namespace dnlab {

// Half-width of the embedded collar around a geodesic of length l:
// asinh(1/sinh(l/2)), switching to the log form below l = 1e-3 so short
// geodesics never overflow. NonPositiveLength for l <= 0.
double collar_halfwidth(double l);
double collar_halfwidth_derivative(double l);  // -1/(2 sinh(l/2))

// Log-radius r = pi^2/l of the punctured-disk picture of the collar.
double collar_log_radius(double l);
double collar_log_radius_derivative(double l);  // -pi^2/l^2
// log10 of the removed-disk radius e^{-r}; stays finite where e^{-r}
// underflows.
double puncture_radius_log10(double l);

// An embedded annulus of modulus m around a curve caps the geodesic length
// in its class at pi/m. NonPositiveModulus for m <= 0.
double geodesic_upper_bound(double m);

// One family point of the degeneration experiment.
struct DegenerationReport {
  double eps = 0;
  std::optional<double> mu;               // absent for the disk-sanity family
  double dn_distance = 0;
  Eigen::Matrix2d bcal = Eigen::Matrix2d::Zero();
  double gamma = 0, delta = 0, beta = 0;
  std::optional<RosenhainTriple> branch;  // absent when a denominator vanished
  double modulus = 0;
  double geo_bound = 0;
  double collar_L = 0;
  std::string case_label;
  std::string flags;  // ';'-separated markers, never commas
};

// Assembles a report row; geo_bound = pi/modulus and collar_L evaluated at
// that bound are filled in here.
DegenerationReport build_report(double eps, std::optional<double> mu,
                                double dn_distance, const Eigen::Matrix2d& bcal,
                                double gamma, double delta, double beta,
                                const std::optional<RosenhainTriple>& branch,
                                double modulus, const std::string& case_label,
                                const std::string& flags);

// Appends trend verdicts to every row's flags: mu increasing, dn distance
// decreasing, geodesic bound decreasing across the rows not flagged as
// errors. A single usable row gets "trends=n/a".
void attach_trend_flags(std::vector<DegenerationReport>& rows);

std::string report_csv_header();
std::string report_csv_row(const DegenerationReport& r);

void save_reports(const std::filesystem::path& file,
                  const std::vector<DegenerationReport>& rows);
std::vector<DegenerationReport> load_reports(const std::filesystem::path& file);

}  // namespace dnlab
