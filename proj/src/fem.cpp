#include "dnlab/fem.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "dnlab/errors.hpp"

namespace dnlab {

namespace {
std::atomic<uint64_t> g_solve_count{0};
}

uint64_t fem_solve_count() { return g_solve_count.load(); }
void reset_fem_solve_count() { g_solve_count.store(0); }
void add_fem_solve(uint64_t n) { g_solve_count.fetch_add(n); }

Eigen::SparseMatrix<double> assemble_stiffness(const SurfaceModel& S) {
  if (S.n_canon == 0) throw MeshError("mesh not finalized");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(S.triangles.size() * 9);
  for (int t = 0; t < int(S.triangles.size()); ++t) {
    double A = S.triangle_area(t);
    auto g = S.barycentric_gradients(t);
    const auto& tr = S.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(S.canon[tr[i]], S.canon[tr[j]], A * g[i].dot(g[j]));
  }
  Eigen::SparseMatrix<double> K(S.n_canon, S.n_canon);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

DirichletSolver::DirichletSolver(const SurfaceModel& S, std::vector<int> fixed_canonical)
    : K_(assemble_stiffness(S)), fixed_(std::move(fixed_canonical)) {
  if (fixed_.empty()) throw SolverError("no Dirichlet dofs given");
  int n = int(K_.rows());
  free_index_.assign(n, 0);
  for (int v : fixed_) {
    if (v < 0 || v >= n) throw SolverError("Dirichlet dof out of range");
    if (free_index_[v] == -1) throw SolverError("duplicate Dirichlet dof");
    free_index_[v] = -1;
  }
  for (int v = 0; v < n; ++v)
    if (free_index_[v] != -1) {
      free_index_[v] = int(free_ids_.size());
      free_ids_.push_back(v);
    }
  int nf = int(free_ids_.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < n; ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, col); it; ++it) {
      int fi = free_index_[it.row()], fj = free_index_[col];
      if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, it.value());
    }
  Kff_.resize(nf, nf);
  Kff_.setFromTriplets(trip.begin(), trip.end());
  ldlt_.compute(Kff_);
  if (ldlt_.info() != Eigen::Success)
    throw SolverError("stiffness factorization failed");
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& fixed_values) const {
  if (fixed_values.size() != Eigen::Index(fixed_.size()))
    throw SolverError("boundary value size mismatch");
  int n = int(K_.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < fixed_.size(); ++i) x[fixed_[i]] = fixed_values[i];
  Eigen::VectorXd load = K_ * x;
  Eigen::VectorXd rhs(free_ids_.size());
  for (size_t i = 0; i < free_ids_.size(); ++i) rhs[i] = -load[free_ids_[i]];
  Eigen::VectorXd xf = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success) throw SolverError("Dirichlet solve failed");
  double rel = (Kff_ * xf - rhs).norm() / std::max(rhs.norm(), 1e-30);
  if (!(rel <= 1e-10) && rhs.norm() > 1e-14)
    throw SolverError("Dirichlet residual too large: " + format_g17(rel));
  for (size_t i = 0; i < free_ids_.size(); ++i) x[free_ids_[i]] = xf[i];
  g_solve_count.fetch_add(1);
  return x;
}

Eigen::VectorXcd DirichletSolver::solve(const Eigen::VectorXcd& fixed_values) const {
  Eigen::VectorXd re = solve(Eigen::VectorXd(fixed_values.real()));
  Eigen::VectorXd im = solve(Eigen::VectorXd(fixed_values.imag()));
  return re + Complex(0, 1) * im;
}

Eigen::VectorXd solve_dirichlet(const SurfaceModel& S,
                                const std::vector<int>& fixed_canonical,
                                const Eigen::VectorXd& fixed_values) {
  return DirichletSolver(S, fixed_canonical).solve(fixed_values);
}

DnAssembly assemble_dn(const SurfaceModel& S, int N) {
  if (N < 1) throw ConfigError("truncation order must be >= 1");
  if (S.boundary_vertices.empty()) throw MeshError("mesh has no boundary");
  int nb = int(S.boundary_vertices.size());
  if (nb < 8 * N)
    throw ResolutionError("boundary has " + std::to_string(nb) +
                          " vertices, need at least " + std::to_string(8 * N));

  std::vector<int> fixed(nb);
  for (int j = 0; j < nb; ++j) fixed[j] = S.canon[S.boundary_vertices[j]];
  DirichletSolver solver(S, fixed);

  int dim = 2 * N + 1;
  std::vector<Eigen::VectorXcd> modes(dim);
  modes[N] = Eigen::VectorXcd::Ones(S.n_canon);
  for (int k = 1; k <= N; ++k) {
    Eigen::VectorXcd g(nb);
    for (int j = 0; j < nb; ++j)
      g[j] = std::polar(1.0, k * S.boundary_phi[j]);
    modes[N + k] = solver.solve(g);
    modes[N - k] = modes[N + k].conjugate();
  }

  const Eigen::SparseMatrix<double>& K = solver.stiffness();
  Eigen::MatrixXcd U(S.n_canon, dim);
  for (int c = 0; c < dim; ++c) U.col(c) = modes[c];
  Eigen::MatrixXcd KU(S.n_canon, dim);
  for (int c = 0; c < dim; ++c) KU.col(c) = K * U.col(c);
  Eigen::MatrixXcd L = (U.adjoint() * KU) / (2.0 * std::numbers::pi);
  double herm_defect = (L - L.adjoint()).norm() / std::max(L.norm(), 1e-30);
  L = 0.5 * (L + L.adjoint().eval());

  BoundaryOperator op;
  op.N = N;
  op.kind = OperatorKind::dn;
  op.mat = L;
  op.meta["mesh"] = mesh_kind_name(S.kind);
  op.meta["n_boundary"] = std::to_string(nb);
  op.meta["herm_defect"] = format_g17(herm_defect);
  return {std::move(op), std::move(modes)};
}

Eigen::VectorXcd weak_boundary_data(const SurfaceModel& S,
                                    const std::vector<Eigen::VectorXcd>& modes,
                                    const std::vector<Eigen::Vector2d>& field) {
  if (field.size() != S.triangles.size())
    throw SolverError("per-triangle field size mismatch");
  int dim = int(modes.size());
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(dim);
  for (int tr = 0; tr < int(S.triangles.size()); ++tr) {
    double A = S.triangle_area(tr);
    auto g = S.barycentric_gradients(tr);
    const auto& tri = S.triangles[tr];
    for (int m = 0; m < dim; ++m) {
      Complex gx = 0, gy = 0;
      for (int i = 0; i < 3; ++i) {
        Complex c = modes[m][S.canon[tri[i]]];
        gx += c * g[i].x();
        gy += c * g[i].y();
      }
      t[m] += A * (std::conj(gx) * field[tr].x() + std::conj(gy) * field[tr].y());
    }
  }
  return t / (2.0 * std::numbers::pi);
}

double annulus_modulus(double r_in, double r_out, double h_target) {
  SurfaceModel S = build_annulus_mesh(r_in, r_out, h_target);
  std::vector<int> fixed;
  Eigen::VectorXd vals;
  int ni = int(S.inner_boundary_vertices.size());
  int no = int(S.boundary_vertices.size());
  vals.resize(ni + no);
  for (int j = 0; j < ni; ++j) {
    fixed.push_back(S.canon[S.inner_boundary_vertices[j]]);
    vals[j] = 1.0;
  }
  for (int j = 0; j < no; ++j) {
    fixed.push_back(S.canon[S.boundary_vertices[j]]);
    vals[ni + j] = 0.0;
  }
  DirichletSolver solver(S, fixed);
  Eigen::VectorXd u = solver.solve(vals);
  double cap = u.dot(solver.stiffness() * u);
  if (!(cap > 0)) throw SolverError("non-positive capacity");
  return 1.0 / cap;
}

}  // namespace dnlab
