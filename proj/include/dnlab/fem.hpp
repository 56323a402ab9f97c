#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <vector>

#include "dnlab/fourier.hpp"
#include "dnlab/mesh.hpp"

namespace dnlab {

// Number of Dirichlet solves performed process-wide (cache effectiveness is
// measured against it).
uint64_t fem_solve_count();
void reset_fem_solve_count();
void add_fem_solve(uint64_t n = 1);

// P1 stiffness matrix on quotient dofs: K_{vw} = sum_T A_T grad(l_v).grad(l_w).
Eigen::SparseMatrix<double> assemble_stiffness(const SurfaceModel& S);

// Harmonic extension from a fixed set of quotient dofs. Factorizes once,
// solves per boundary datum; SolverError if the discrete residual exceeds
// 1e-10 relatively.
class DirichletSolver {
 public:
  DirichletSolver(const SurfaceModel& S, std::vector<int> fixed_canonical);

  Eigen::VectorXd solve(const Eigen::VectorXd& fixed_values) const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& fixed_values) const;

  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }
  int n_dofs() const { return int(K_.rows()); }

 private:
  Eigen::SparseMatrix<double> K_, Kff_;
  std::vector<int> fixed_;
  std::vector<int> free_index_;  // canonical id -> free position, -1 if fixed
  std::vector<int> free_ids_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

// One-shot harmonic extension.
Eigen::VectorXd solve_dirichlet(const SurfaceModel& S,
                                const std::vector<int>& fixed_canonical,
                                const Eigen::VectorXd& fixed_values);

struct DnAssembly {
  BoundaryOperator op;                  // truncated boundary-to-flux map
  std::vector<Eigen::VectorXcd> modes;  // harmonic lifts of e^{ik phi}, index k+N
};

// Weak boundary-to-flux operator of the surface seen from its boundary circle:
// entry (j,k) = (1/2pi) int grad(conj u_j).grad(u_k), with u_k the harmonic
// lift of e^{ik phi}. The parametrization by phi makes the result scale-free,
// so no hole radius enters. ResolutionError if the boundary carries fewer
// than 8N vertices.
DnAssembly assemble_dn(const SurfaceModel& S, int N);

// Flux data of a per-triangle vector field G against the lifted modes:
// t_k = (1/2pi) sum_T A_T conj(grad u_k).G_T. For G = grad(v) with v harmonic
// this equals the Fourier data of the phi-weighted normal derivative of v.
Eigen::VectorXcd weak_boundary_data(const SurfaceModel& S,
                                    const std::vector<Eigen::VectorXcd>& modes,
                                    const std::vector<Eigen::Vector2d>& field);

// Conformal modulus of the round annulus r_in < |z| < r_out, computed from
// the capacity of the harmonic potential (1 inside, 0 outside):
// m = 1 / int |grad u|^2. Exact value is log(r_out/r_in) / (2 pi).
double annulus_modulus(double r_in, double r_out, double h_target);

}  // namespace dnlab
