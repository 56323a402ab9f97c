#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dnlab/fem.hpp"
#include "dnlab/fourier.hpp"
#include "dnlab/mesh.hpp"

namespace dnlab {

// Piecewise-constant 1-form: one vector per triangle, components in the raw
// chart (translation-invariant across seams).
struct DiscreteForm {
  std::vector<Eigen::Vector2d> tri_vec;
};

// 90 degree rotation (p,q) -> (-q,p); with the ccw orientation of the raw
// chart this realizes the complex structure (star dx = dy).
DiscreteForm star(const DiscreteForm& w);

double form_l2_product(const SurfaceModel& S, const DiscreteForm& w,
                       const DiscreteForm& x);

// Integral of w ^ x over the surface (dx ^ dy positive).
double wedge_integral(const SurfaceModel& S, const DiscreteForm& w,
                      const DiscreteForm& x);

// Line integral along the stored a or b cycle; `starred` integrates star(w).
// Edge values average the adjacent triangles, which is exact for tangentially
// continuous data.
double period_integral(const SurfaceModel& S, const DiscreteForm& w, char cycle,
                       bool starred);

// Harmonic representatives (closed, weakly co-closed, zero tangential trace)
// dual to the cycles: int_a v_e = delta_{ae}, int_b v_e = delta_{be} exactly.
// Built by minimizing the energy of cut forms over potentials constant on the
// boundary, then recombining by the inverse raw period matrix.
// DegenerateBasis if that matrix has condition number > 1e8.
std::pair<DiscreteForm, DiscreteForm> harmonic_form_basis(const SurfaceModel& S);

// Fourier data of a form's weighted normal component on the boundary circle,
// evaluated weakly against the lifted DN modes.
BoundaryFunction form_trace(const SurfaceModel& S,
                            const std::vector<Eigen::VectorXcd>& modes,
                            const DiscreteForm& w);

// Splits the boundary response of f: h = Hf and trace = -L(H^2+I)f, the part
// of star(du^f) carried by harmonic forms. NotMeanZero unless f is mean-zero;
// SingularDN propagates from the Hilbert transform.
std::pair<BoundaryFunction, BoundaryFunction> hodge_decompose(
    const SurfaceModel& S, const BoundaryOperator& dn, const BoundaryFunction& f);

}  // namespace dnlab
