#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dnlab/io.hpp"

namespace dnlab {

// Half-integer characteristic stored as the doubled flags (2a1, 2a2, 2b1, 2b2).
using Characteristic = std::array<int, 4>;

// a.b parity decides whether the constant vanishes identically.
bool odd_characteristic(const Characteristic& chi);

// The ten characteristics with even parity, lexicographic.
const std::vector<Characteristic>& even_characteristics();

struct ThetaConstant {
  Characteristic characteristic{};
  Complex value;
  int R = 0;           // lattice truncation radius actually used
  double tail_bound = 0;  // rigorous bound on the dropped terms
  bool vanishing = false;  // |value| <= vanishing_tol and odd parity
};

// Lattice sum over ||n||_inf <= R, shells in increasing radius and rows
// lexicographic inside each shell, R chosen so the Gaussian tail bound
// (rate pi lambda_min(Im B)) drops below 1e-14 of the partial sum; min_R
// forces extra shells on top of that.
// NotSiegel unless B is symmetric with positive definite imaginary part;
// SlowConvergence when R would pass 200.
ThetaConstant theta_constant(const Eigen::Matrix2cd& B, const Characteristic& chi,
                             double vanishing_tol = 1e-12, int min_R = 0);

std::string theta_csv_header();
// "a1a2b1b2,re,im,radius,tail_bound" with %.17g fields.
std::string theta_csv_row(const ThetaConstant& t);

struct RosenhainTriple {
  Complex lambda1, lambda2, lambda3;
};

// Branch points of the hyperelliptic model from squared theta-constant
// ratios. NearDegenerate (naming the constant) when a denominator constant
// falls to 1e-10 or below.
RosenhainTriple rosenhain(const Eigen::Matrix2cd& B, double degenerate_tol = 1e-10,
                          int min_R = 0);

struct DegenerationDiagnostics {
  double b_norm;        // ||B||_inf, max absolute row sum
  double im_inv_norm;   // ||(Im B)^-1||_inf
  double beta_mag;      // off-diagonal magnitude |B_01|
};

struct DegenerationClassification {
  std::vector<DegenerationDiagnostics> points;
  std::string label;
};

// Labels a degenerating family: "case-i (homologically trivial pinch)" when
// ||B||_inf stays bounded (last/first <= 2) and |beta| strictly decreases,
// else "case-ii (homologically nontrivial pinch)" when ||(Im B)^-1||_inf
// strictly decreases, else "mixed/undecided". InsufficientData for fewer
// than 3 points or mu not strictly increasing.
DegenerationClassification classify_degeneration(
    const std::vector<std::pair<Eigen::Matrix2cd, double>>& sequence);

}  // namespace dnlab
