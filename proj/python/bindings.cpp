#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnlab/collar.hpp"
#include "dnlab/errors.hpp"
#include "dnlab/fem.hpp"
#include "dnlab/fourier.hpp"
#include "dnlab/mesh.hpp"
#include "dnlab/periods.hpp"
#include "dnlab/spectral.hpp"
#include "dnlab/theta.hpp"

namespace py = pybind11;
using namespace dnlab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boundary operators of holed flat tori, their interior "
            "eigenvalue, period couplings, Siegel reduction, theta "
            "constants and collar estimates.";

  py::register_exception<Error>(m, "Error");

  py::class_<BoundaryFunction>(m, "BoundaryFunction")
      .def(py::init<int>(), py::arg("N"))
      .def_readonly("N", &BoundaryFunction::N)
      .def_property(
          "coeff", [](const BoundaryFunction& f) { return f.coeff; },
          [](BoundaryFunction& f, const Eigen::VectorXcd& v) {
            if (v.size() != f.coeff.size())
              throw TruncationMismatch("coefficient vector has wrong size");
            f.coeff = v;
          })
      .def_static("mode", &BoundaryFunction::mode, py::arg("N"), py::arg("k"),
                  py::arg("amplitude") = Complex(1.0, 0.0))
      .def("get",
           [](const BoundaryFunction& f, int k) {
             if (k < -f.N || k > f.N)
               throw TruncationMismatch("mode index out of range");
             return f.c(k);
           },
           py::arg("k"))
      .def("set",
           [](BoundaryFunction& f, int k, Complex v) {
             if (k < -f.N || k > f.N)
               throw TruncationMismatch("mode index out of range");
             f.c(k) = v;
           },
           py::arg("k"), py::arg("value"))
      .def("eval", &BoundaryFunction::eval, py::arg("phi"))
      .def("conjugated", &BoundaryFunction::conjugated)
      .def("norm", &BoundaryFunction::norm);

  py::class_<BoundaryOperator>(m, "BoundaryOperator")
      .def_readonly("N", &BoundaryOperator::N)
      .def_property_readonly(
          "mat", [](const BoundaryOperator& op) { return op.mat; })
      .def("apply", &BoundaryOperator::apply, py::arg("f"))
      .def("hermitian_defect", &BoundaryOperator::hermitian_defect)
      .def("kernel_constant_defect", &BoundaryOperator::kernel_constant_defect);

  m.def("dn_disk", &dn_disk, py::arg("N"));
  m.def("hilbert_from_dn", &hilbert_from_dn, py::arg("dn"));
  m.def("lambda_inner", &lambda_inner, py::arg("dn"), py::arg("f"),
        py::arg("g"));
  m.def("operator_distance", &operator_distance, py::arg("A"), py::arg("B"));
  m.def("make_synthetic_dn", &make_synthetic_dn, py::arg("mu"),
        py::arg("N") = 32);
  m.def("smoothing_defect", &smoothing_defect, py::arg("dn"));

  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("mu", &SpectralData::mu)
      .def_readonly("eta", &SpectralData::eta)
      .def_readonly("eigenvalues", &SpectralData::eigenvalues)
      .def_readonly("cluster_gaps", &SpectralData::cluster_gaps)
      .def_readonly("pair_defect", &SpectralData::pair_defect);
  m.def("extract_mu", &extract_mu, py::arg("dn"), py::arg("band_lo") = 0.01,
        py::arg("band_hi") = 0.999);

  m.def("extract_c",
        [](const BoundaryOperator& dn, const SpectralData& sp,
           const BoundaryFunction& trace, double residual_tol) {
          ExtractCResult r = extract_c(dn, sp, trace, residual_tol);
          return py::make_tuple(r.c, r.residual);
        },
        py::arg("dn"), py::arg("spectral"), py::arg("trace"),
        py::arg("residual_tol") = 0.05);
  m.def("bcal_from_boundary",
        [](double mu, Complex c_a, Complex c_b, bool strict, double threshold) {
          BcalResult r = bcal_from_boundary(mu, c_a, c_b, strict, threshold);
          return py::make_tuple(r.bcal, r.normalization_defect);
        },
        py::arg("mu"), py::arg("c_a"), py::arg("c_b"),
        py::arg("strict") = false, py::arg("threshold") = 0.05);
  m.def("dual_abelian_coeffs", &dual_abelian_coeffs, py::arg("bcal"));
  m.def("dual_normalization_periods", &dual_normalization_periods,
        py::arg("bcal"), py::arg("e_a"), py::arg("e_b"));

  py::class_<SiegelData>(m, "SiegelData")
      .def_readonly("gamma", &SiegelData::gamma)
      .def_readonly("delta", &SiegelData::delta)
      .def_readonly("beta", &SiegelData::beta)
      .def_readonly("B", &SiegelData::B);
  m.def("assemble_siegel", &assemble_siegel, py::arg("mu"), py::arg("bcal"));

  py::class_<DomainReport>(m, "DomainReport")
      .def_readonly("inside", &DomainReport::inside)
      .def_readonly("gamma_low_slack", &DomainReport::gamma_low_slack)
      .def_readonly("gamma_high_slack", &DomainReport::gamma_high_slack)
      .def_readonly("delta_slack", &DomainReport::delta_slack)
      .def_readonly("pd_slack", &DomainReport::pd_slack);
  m.def("in_fundamental_domain", &in_fundamental_domain, py::arg("gamma"),
        py::arg("delta"), py::arg("beta"));

  py::class_<NormalizeResult>(m, "NormalizeResult")
      .def_readonly("gamma", &NormalizeResult::gamma)
      .def_readonly("delta", &NormalizeResult::delta)
      .def_readonly("beta", &NormalizeResult::beta)
      .def_readonly("moves", &NormalizeResult::moves)
      .def_readonly("reduction_incomplete",
                    &NormalizeResult::reduction_incomplete);
  m.def("normalize_symmetric", &normalize_symmetric, py::arg("gamma"),
        py::arg("delta"), py::arg("beta"));
  m.def("apply_moves", &apply_moves, py::arg("gamma"), py::arg("delta"),
        py::arg("beta"), py::arg("moves"));

  py::class_<ThetaConstant>(m, "ThetaConstant")
      .def_readonly("characteristic", &ThetaConstant::characteristic)
      .def_readonly("value", &ThetaConstant::value)
      .def_readonly("R", &ThetaConstant::R)
      .def_readonly("tail_bound", &ThetaConstant::tail_bound)
      .def_readonly("vanishing", &ThetaConstant::vanishing);
  m.def("theta_constant", &theta_constant, py::arg("B"),
        py::arg("characteristic"), py::arg("vanishing_tol") = 1e-12,
        py::arg("min_R") = 0);
  m.def("odd_characteristic", &odd_characteristic, py::arg("characteristic"));
  m.def("even_characteristics",
        [] { return even_characteristics(); });

  py::class_<RosenhainTriple>(m, "RosenhainTriple")
      .def_readonly("lambda1", &RosenhainTriple::lambda1)
      .def_readonly("lambda2", &RosenhainTriple::lambda2)
      .def_readonly("lambda3", &RosenhainTriple::lambda3);
  m.def("rosenhain", &rosenhain, py::arg("B"),
        py::arg("degenerate_tol") = 1e-10, py::arg("min_R") = 0);

  py::class_<DegenerationDiagnostics>(m, "DegenerationDiagnostics")
      .def_readonly("b_norm", &DegenerationDiagnostics::b_norm)
      .def_readonly("im_inv_norm", &DegenerationDiagnostics::im_inv_norm)
      .def_readonly("beta_mag", &DegenerationDiagnostics::beta_mag);
  py::class_<DegenerationClassification>(m, "DegenerationClassification")
      .def_readonly("points", &DegenerationClassification::points)
      .def_readonly("label", &DegenerationClassification::label);
  m.def("classify_degeneration", &classify_degeneration, py::arg("path"));

  m.def("collar_halfwidth", &collar_halfwidth, py::arg("l"));
  m.def("collar_halfwidth_derivative", &collar_halfwidth_derivative,
        py::arg("l"));
  m.def("collar_log_radius", &collar_log_radius, py::arg("l"));
  m.def("collar_log_radius_derivative", &collar_log_radius_derivative,
        py::arg("l"));
  m.def("puncture_radius_log10", &puncture_radius_log10, py::arg("l"));
  m.def("geodesic_upper_bound", &geodesic_upper_bound, py::arg("m"));

  py::class_<SurfaceModel>(m, "SurfaceModel")
      .def_property_readonly(
          "n_vertices",
          [](const SurfaceModel& S) { return S.vertices.size(); })
      .def_property_readonly(
          "n_triangles",
          [](const SurfaceModel& S) { return S.triangles.size(); })
      .def_property_readonly(
          "n_boundary",
          [](const SurfaceModel& S) { return S.boundary_vertices.size(); })
      .def("euler_characteristic", &SurfaceModel::euler_characteristic);
  m.def("build_disk_mesh", &build_disk_mesh, py::arg("h_target"),
        py::arg("min_boundary_segments") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("build_mesh", &build_mesh, py::arg("tau"), py::arg("eps"),
        py::arg("h_target"), py::arg("min_boundary_segments") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("assemble_dn",
        [](const SurfaceModel& S, int N) { return assemble_dn(S, N).op; },
        py::arg("S"), py::arg("N"), py::call_guard<py::gil_scoped_release>());
  m.def("annulus_modulus", &annulus_modulus, py::arg("r_in"), py::arg("r_out"),
        py::arg("h_target"), py::call_guard<py::gil_scoped_release>());
  m.def("fem_solve_count", &fem_solve_count);
}
