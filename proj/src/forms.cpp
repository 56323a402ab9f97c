#include "dnlab/forms.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

#include "dnlab/errors.hpp"

namespace dnlab {

DiscreteForm star(const DiscreteForm& w) {
  DiscreteForm r;
  r.tri_vec.reserve(w.tri_vec.size());
  for (const auto& v : w.tri_vec) r.tri_vec.emplace_back(-v.y(), v.x());
  return r;
}

double form_l2_product(const SurfaceModel& S, const DiscreteForm& w,
                       const DiscreteForm& x) {
  double acc = 0;
  for (int t = 0; t < int(S.triangles.size()); ++t)
    acc += S.triangle_area(t) * w.tri_vec[t].dot(x.tri_vec[t]);
  return acc;
}

double wedge_integral(const SurfaceModel& S, const DiscreteForm& w,
                      const DiscreteForm& x) {
  double acc = 0;
  for (int t = 0; t < int(S.triangles.size()); ++t)
    acc += S.triangle_area(t) *
           (w.tri_vec[t].x() * x.tri_vec[t].y() - w.tri_vec[t].y() * x.tri_vec[t].x());
  return acc;
}

double period_integral(const SurfaceModel& S, const DiscreteForm& w, char cycle,
                       bool starred) {
  const std::vector<int>& path = (cycle == 'a') ? S.cycle_a : S.cycle_b;
  if (cycle != 'a' && cycle != 'b') throw GeometryError("cycle tag must be a or b");
  if (path.size() < 2) throw GeometryError("mesh carries no such cycle");
  double acc = 0;
  for (size_t j = 0; j + 1 < path.size(); ++j) {
    Eigen::Vector2d e = S.vertices[path[j + 1]] - S.vertices[path[j]];
    auto it = S.edge_tris.find(
        SurfaceModel::edge_key(S.canon[path[j]], S.canon[path[j + 1]]));
    if (it == S.edge_tris.end()) throw GeometryError("cycle leaves the edge graph");
    double val = 0;
    int cnt = 0;
    for (int t : it->second) {
      if (t < 0) continue;
      Eigen::Vector2d v = w.tri_vec[t];
      if (starred) v = Eigen::Vector2d(-v.y(), v.x());
      val += v.dot(e);
      ++cnt;
    }
    acc += val / cnt;
  }
  return acc;
}

namespace {

// Energy minimizer over potentials with the whole boundary merged into one
// dof (pinned as gauge): the result is closed, co-closed in the interior, and
// has zero tangential boundary trace.
struct CutFormSolver {
  const SurfaceModel& S;
  std::vector<int> red;  // canonical id -> reduced dof
  int n_red = 0;
  Eigen::SparseMatrix<double> Kff;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  explicit CutFormSolver(const SurfaceModel& s) : S(s) {
    red.assign(S.n_canon, -1);
    if (!S.boundary_vertices.empty()) {
      for (int v : S.boundary_vertices) red[S.canon[v]] = 0;
      n_red = 1;
    }
    for (int c = 0; c < S.n_canon; ++c)
      if (red[c] < 0) red[c] = n_red++;
    // reduced dof 0 is pinned; with a connected mesh the kernel of the merged
    // stiffness is the constants, so this is a pure gauge choice
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < int(S.triangles.size()); ++t) {
      double A = S.triangle_area(t);
      auto g = S.barycentric_gradients(t);
      const auto& tr = S.triangles[t];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int ri = red[S.canon[tr[i]]], rj = red[S.canon[tr[j]]];
          if (ri > 0 && rj > 0) trip.emplace_back(ri - 1, rj - 1, A * g[i].dot(g[j]));
        }
    }
    Kff.resize(n_red - 1, n_red - 1);
    Kff.setFromTriplets(trip.begin(), trip.end());
    ldlt.compute(Kff);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("cut-form factorization failed");
  }

  DiscreteForm minimize(const std::vector<Eigen::Vector2d>& theta) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_red - 1);
    for (int t = 0; t < int(S.triangles.size()); ++t) {
      double A = S.triangle_area(t);
      auto g = S.barycentric_gradients(t);
      const auto& tr = S.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int ri = red[S.canon[tr[i]]];
        if (ri > 0) b[ri - 1] -= A * g[i].dot(theta[t]);
      }
    }
    Eigen::VectorXd x = ldlt.solve(b);
    if (ldlt.info() != Eigen::Success) throw SolverError("cut-form solve failed");
    if (b.norm() > 1e-14) {
      double rel = (Kff * x - b).norm() / b.norm();
      if (!(rel <= 1e-10))
        throw SolverError("cut-form residual too large: " + format_g17(rel));
    }
    add_fem_solve();
    DiscreteForm w;
    w.tri_vec.resize(S.triangles.size());
    for (int t = 0; t < int(S.triangles.size()); ++t) {
      auto g = S.barycentric_gradients(t);
      const auto& tr = S.triangles[t];
      Eigen::Vector2d v = theta[t];
      for (int i = 0; i < 3; ++i) {
        int ri = red[S.canon[tr[i]]];
        if (ri > 0) v += x[ri - 1] * g[i];
      }
      w.tri_vec[t] = v;
    }
    return w;
  }
};

}  // namespace

std::pair<DiscreteForm, DiscreteForm> harmonic_form_basis(const SurfaceModel& S) {
  if (S.kind != MeshKind::torus_hole && S.kind != MeshKind::closed_torus)
    throw GeometryError("harmonic basis needs a torus mesh");

  // Cut forms d(s - chi_s), d(t - chi_t): the lattice coordinate made
  // single-valued near the hole by subtracting its cutoff copy, so the
  // tangential trace vanishes there while the cycle periods stay (1,0)/(0,1).
  Eigen::Vector2d grad_s(1.0, -S.tau.real() / S.tau.imag());
  Eigen::Vector2d grad_t(0.0, 1.0 / S.tau.imag());
  std::vector<double> chi_s(S.n_canon, 0.0), chi_t(S.n_canon, 0.0);
  if (S.kind == MeshKind::torus_hole) {
    Eigen::Vector2d c(0.5 * (1.0 + S.tau.real()), 0.5 * S.tau.imag());
    double rho_cut = 0.5 * (S.eps + torus_d_edge(S.tau));
    for (int v = 0; v < int(S.vertices.size()); ++v) {
      if ((S.vertices[v] - c).norm() <= rho_cut) {
        Eigen::Vector2d st = lattice_coords(S.tau, S.vertices[v]);
        chi_s[S.canon[v]] = st.x();
        chi_t[S.canon[v]] = st.y();
      }
    }
  }

  int nt = int(S.triangles.size());
  std::vector<Eigen::Vector2d> theta_a(nt), theta_b(nt);
  for (int t = 0; t < nt; ++t) {
    auto g = S.barycentric_gradients(t);
    const auto& tr = S.triangles[t];
    Eigen::Vector2d va = grad_s, vb = grad_t;
    for (int i = 0; i < 3; ++i) {
      va -= chi_s[S.canon[tr[i]]] * g[i];
      vb -= chi_t[S.canon[tr[i]]] * g[i];
    }
    theta_a[t] = va;
    theta_b[t] = vb;
  }

  CutFormSolver solver(S);
  DiscreteForm ma = solver.minimize(theta_a);
  DiscreteForm mb = solver.minimize(theta_b);

  Eigen::Matrix2d P;
  P << period_integral(S, ma, 'a', false), period_integral(S, mb, 'a', false),
      period_integral(S, ma, 'b', false), period_integral(S, mb, 'b', false);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(P);
  double smin = svd.singularValues()(1);
  if (!(smin > 0) || svd.singularValues()(0) / smin > 1e8)
    throw DegenerateBasis("raw period matrix condition " +
                          format_g17(smin > 0 ? svd.singularValues()(0) / smin
                                              : std::numeric_limits<double>::infinity()));
  Eigen::Matrix2d Pi = P.inverse();

  DiscreteForm va, vb;
  va.tri_vec.resize(nt);
  vb.tri_vec.resize(nt);
  for (int t = 0; t < nt; ++t) {
    va.tri_vec[t] = Pi(0, 0) * ma.tri_vec[t] + Pi(1, 0) * mb.tri_vec[t];
    vb.tri_vec[t] = Pi(0, 1) * ma.tri_vec[t] + Pi(1, 1) * mb.tri_vec[t];
  }
  return {std::move(va), std::move(vb)};
}

BoundaryFunction form_trace(const SurfaceModel& S,
                            const std::vector<Eigen::VectorXcd>& modes,
                            const DiscreteForm& w) {
  Eigen::VectorXcd t = weak_boundary_data(S, modes, w.tri_vec);
  BoundaryFunction f;
  f.N = (int(modes.size()) - 1) / 2;
  f.coeff = t;
  return f;
}

std::pair<BoundaryFunction, BoundaryFunction> hodge_decompose(
    const SurfaceModel&, const BoundaryOperator& dn, const BoundaryFunction& f) {
  if (!f.is_mean_zero()) throw NotMeanZero("hodge decomposition needs mean-zero data");
  BoundaryOperator H = hilbert_from_dn(dn);
  BoundaryFunction h = H.apply(f);
  BoundaryFunction h2 = H.apply(h);
  BoundaryFunction sum;
  sum.N = f.N;
  sum.coeff = h2.coeff + f.coeff;
  BoundaryFunction trace = dn.apply(sum);
  trace.coeff = -trace.coeff;
  return {std::move(h), std::move(trace)};
}

}  // namespace dnlab
