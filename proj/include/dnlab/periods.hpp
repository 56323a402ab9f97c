#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dnlab/forms.hpp"
#include "dnlab/fourier.hpp"
#include "dnlab/spectral.hpp"

namespace dnlab {

struct ExtractCResult {
  Complex c;
  double residual;  // relative distance of the trace to span{L eta, L eta-bar}
};

// Coefficient of a harmonic-form trace in the eta representation: solves
// trace = -(1-mu^2) L(c eta + conj(c) eta-bar) via c = (f~, eta)_L with
// f~ = -L^+ trace / (1-mu^2). LargeResidual if the trace sits further than
// residual_tol from the two-dimensional range.
ExtractCResult extract_c(const BoundaryOperator& dn, const SpectralData& spectral,
                         const BoundaryFunction& trace, double residual_tol = 0.05);

struct BcalResult {
  Eigen::Matrix2d bcal;           // rows/cols ordered (a,b)
  double normalization_defect;    // |2 mu (mu^2-1) Im(c_a conj(c_b)) - 1|
};

// Auxiliary period matrix from boundary data:
// Bcal_ab = -2(1-mu^2)|c_b|^2, Bcal_ba = 2(1-mu^2)|c_a|^2,
// Bcal_bb = -Bcal_aa = 2(1-mu^2) Re(c_a conj(c_b)).
// In strict mode NormalizationViolated when the defect exceeds threshold.
BcalResult bcal_from_boundary(double mu, Complex c_a, Complex c_b,
                              bool strict = false, double threshold = 0.05);

// Same matrix by interior star-line integrals Bcal_qe = int_{q+} star(v_e).
Eigen::Matrix2d bcal_from_interior(const SurfaceModel& S, const DiscreteForm& va,
                                   const DiscreteForm& vb);

// Coefficients normalizing the dual Abelian differential: e_a = -i/2,
// e_b = (i Bcal_aa - 1) / (2 Bcal_ab). DivisionByZero when Bcal_ab = 0.
std::pair<Complex, Complex> dual_abelian_coeffs(const Eigen::Matrix2d& bcal);

// a-periods of the normalized differential implied by (e_a, e_b):
// across the two boundary copies they must come out (1, 0) exactly.
std::pair<Complex, Complex> dual_normalization_periods(const Eigen::Matrix2d& bcal,
                                                       Complex e_a, Complex e_b);

struct SiegelData {
  double gamma, delta, beta;
  Eigen::Matrix2cd B;  // [[gamma+i delta, i beta], [i beta, -gamma+i delta]]
};

// Symmetric-form b-period matrix: gamma = Bcal_bb/(mu^2 Bcal_ab),
// delta = -(mu^2+1)/(2 mu^2 Bcal_ab), beta = -(mu^2-1)/(2 mu^2 Bcal_ab).
// NotSiegel unless Im B is positive definite (delta > |beta|).
SiegelData assemble_siegel(double mu, const Eigen::Matrix2d& bcal);

struct DomainReport {
  bool inside;
  double gamma_low_slack;   // gamma - 0
  double gamma_high_slack;  // 1/2 - gamma
  double delta_slack;       // delta^2 - (1 - gamma^2 + beta^2)
  double pd_slack;          // delta^2 - beta^2
};

DomainReport in_fundamental_domain(double gamma, double delta, double beta);

struct NormalizeResult {
  double gamma, delta, beta;
  std::vector<std::string> moves;  // replayable log
  bool reduction_incomplete;
};

// Integer translations and sign flips bringing gamma into [0, 1/2] and beta
// to >= 0; delta untouched. Idempotent; flags reduction-incomplete when the
// membership test still fails afterwards.
NormalizeResult normalize_symmetric(double gamma, double delta, double beta);

// Replays a move log ("gamma+=<n>", "gamma=-gamma", "beta=-beta").
std::array<double, 3> apply_moves(double gamma, double delta, double beta,
                                  const std::vector<std::string>& moves);

struct PeriodData {
  double mu = 0;
  Complex c_a, c_b;
  Eigen::Matrix2d bcal = Eigen::Matrix2d::Zero();
  double gamma = 0, delta = 0, beta = 0;
  Complex e_a, e_b;
};

void save_period_data(const std::filesystem::path& file, const PeriodData& p);
PeriodData load_period_data(const std::filesystem::path& file);

void save_siegel_matrix(const std::filesystem::path& file, const Eigen::Matrix2cd& B);
Eigen::Matrix2cd load_siegel_matrix(const std::filesystem::path& file);

}  // namespace dnlab
