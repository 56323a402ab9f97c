#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <map>
#include <string>

namespace dnlab {

using Complex = std::complex<double>;

// Function on the unit circle in the truncated Fourier basis e^{ik phi},
// k = -N..N; coefficient of mode k sits at index k+N.
struct BoundaryFunction {
  int N = 0;
  Eigen::VectorXcd coeff;  // size 2N+1

  BoundaryFunction() = default;
  explicit BoundaryFunction(int n) : N(n), coeff(Eigen::VectorXcd::Zero(2 * n + 1)) {}

  static BoundaryFunction mode(int N, int k, Complex amplitude = Complex(1, 0));

  Complex& c(int k) { return coeff(k + N); }
  Complex c(int k) const { return coeff(k + N); }

  int size() const { return 2 * N + 1; }
  double norm() const { return coeff.norm(); }
  bool is_mean_zero(double tol = 1e-12) const { return std::abs(c(0)) <= tol; }

  // Pointwise complex conjugate of the function: c_k -> conj(c_{-k}).
  BoundaryFunction conjugated() const;

  Complex eval(double phi) const;  // sum_k c_k e^{ik phi}
};

enum class OperatorKind { dn, hilbert, general };

std::string operator_kind_name(OperatorKind k);
OperatorKind operator_kind_from_name(const std::string& name);

// Dense operator on the truncated basis; matrix entry (j+N, k+N) maps mode k
// to its mode-j component.
struct BoundaryOperator {
  int N = 0;
  OperatorKind kind = OperatorKind::general;
  Eigen::MatrixXcd mat;
  std::map<std::string, std::string> meta;  // serialized to the sidecar file

  BoundaryOperator() = default;
  BoundaryOperator(int n, OperatorKind k)
      : N(n), kind(k), mat(Eigen::MatrixXcd::Zero(2 * n + 1, 2 * n + 1)) {}

  int size() const { return 2 * N + 1; }
  BoundaryFunction apply(const BoundaryFunction& f) const;  // TruncationMismatch

  double hermitian_defect() const;      // ||M - M^H|| / max(||M||, eps)
  double kernel_constant_defect() const;  // ||M e_0|| + ||e_0^H M||
};

// DN map of the unit disk: diag(|k|).
BoundaryOperator dn_disk(int N);

// H = -Lambda^{-1} d/dphi with the inverse taken on the mean-zero subspace
// and H = 0 on constants. SingularDN if the mean-zero block is singular.
BoundaryOperator hilbert_from_dn(const BoundaryOperator& dn);

// (Lambda f, g) in L2(T, dphi): 2*pi * sum_k (Lambda f)_k conj(g_k).
// NotMeanZero if either argument has a constant component above 1e-12.
Complex lambda_inner(const BoundaryOperator& dn, const BoundaryFunction& f,
                     const BoundaryFunction& g);

// Spectral norm of (A - B) W^{-1}, W = diag(sqrt(1+k^2)): the discretized
// H^1 -> L2 distance between boundary operators. TruncationMismatch.
double operator_distance(const BoundaryOperator& A, const BoundaryOperator& B);

// Text matrix format: first line "N=<int>", then 2N+1 comma-separated rows of
// "a+bi" entries; metadata goes to a key=value sidecar at <file>.meta.
void save_operator(const std::filesystem::path& file, const BoundaryOperator& op);
BoundaryOperator load_operator(const std::filesystem::path& file);

// Coefficient-vector text format: "N=<int>" then 2N+1 lines of "a+bi".
void save_function(const std::filesystem::path& file, const BoundaryFunction& f);
BoundaryFunction load_function(const std::filesystem::path& file);

}  // namespace dnlab
