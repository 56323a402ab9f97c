#include "dnlab/fourier.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dnlab/errors.hpp"
#include "dnlab/io.hpp"

namespace dnlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_same_truncation(int a, int b, const char* who) {
  if (a != b)
    throw TruncationMismatch(std::string(who) + ": truncations differ (N=" +
                             std::to_string(a) + " vs N=" + std::to_string(b) + ")");
}

// Restriction of a (2N+1)-dim operator to the mean-zero modes (k=0 removed).
Eigen::MatrixXcd mean_zero_block(const Eigen::MatrixXcd& M, int N) {
  const int n = 2 * N + 1;
  Eigen::MatrixXcd S(n - 1, n - 1);
  for (int r = 0, rr = 0; r < n; ++r) {
    if (r == N) continue;
    for (int c = 0, cc = 0; c < n; ++c) {
      if (c == N) continue;
      S(rr, cc) = M(r, c);
      ++cc;
    }
    ++rr;
  }
  return S;
}
}  // namespace

BoundaryFunction BoundaryFunction::mode(int N, int k, Complex amplitude) {
  if (std::abs(k) > N) throw TruncationMismatch("mode index exceeds truncation");
  BoundaryFunction f(N);
  f.c(k) = amplitude;
  return f;
}

BoundaryFunction BoundaryFunction::conjugated() const {
  BoundaryFunction g(N);
  for (int k = -N; k <= N; ++k) g.c(k) = std::conj(c(-k));
  return g;
}

Complex BoundaryFunction::eval(double phi) const {
  Complex s = 0;
  for (int k = -N; k <= N; ++k) s += c(k) * std::polar(1.0, k * phi);
  return s;
}

std::string operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::dn: return "dn";
    case OperatorKind::hilbert: return "hilbert";
    case OperatorKind::general: return "general";
  }
  return "general";
}

OperatorKind operator_kind_from_name(const std::string& name) {
  if (name == "dn") return OperatorKind::dn;
  if (name == "hilbert") return OperatorKind::hilbert;
  return OperatorKind::general;
}

BoundaryFunction BoundaryOperator::apply(const BoundaryFunction& f) const {
  check_same_truncation(N, f.N, "apply");
  BoundaryFunction g(N);
  g.coeff = mat * f.coeff;
  return g;
}

double BoundaryOperator::hermitian_defect() const {
  const double scale = std::max(mat.norm(), 1e-300);
  return (mat - mat.adjoint()).norm() / scale;
}

double BoundaryOperator::kernel_constant_defect() const {
  return mat.col(N).norm() + mat.row(N).norm();
}

BoundaryOperator dn_disk(int N) {
  BoundaryOperator op(N, OperatorKind::dn);
  for (int k = -N; k <= N; ++k) op.mat(k + N, k + N) = std::abs(k);
  op.meta["kind"] = "dn";
  op.meta["family"] = "disk-exact";
  op.meta["N"] = std::to_string(N);
  return op;
}

BoundaryOperator hilbert_from_dn(const BoundaryOperator& dn) {
  if (dn.kind != OperatorKind::dn)
    throw Error("hilbert_from_dn: operator kind must be dn");
  const int N = dn.N;
  const int m = 2 * N;  // mean-zero dimension
  const Eigen::MatrixXcd S = mean_zero_block(dn.mat, N);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(m - 1) <= 1e-12)
    throw SingularDN("hilbert_from_dn: DN map singular on mean-zero subspace (sigma_min=" +
                     format_g17(svd.singularValues()(m - 1)) + ")");

  // d/dphi is diag(ik) on the mean-zero modes.
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(m, m);
  for (int k = -N, r = 0; k <= N; ++k) {
    if (k == 0) continue;
    D(r, r) = Complex(0, k);
    ++r;
  }
  const Eigen::MatrixXcd Hsub = -svd.solve(D);

  BoundaryOperator H(N, OperatorKind::hilbert);
  for (int r = 0, rr = 0; r < 2 * N + 1; ++r) {
    if (r == N) continue;
    for (int c = 0, cc = 0; c < 2 * N + 1; ++c) {
      if (c == N) continue;
      H.mat(r, c) = Hsub(rr, cc);
      ++cc;
    }
    ++rr;
  }
  H.meta = dn.meta;
  H.meta["kind"] = "hilbert";
  return H;
}

Complex lambda_inner(const BoundaryOperator& dn, const BoundaryFunction& f,
                     const BoundaryFunction& g) {
  if (dn.kind != OperatorKind::dn) throw Error("lambda_inner: operator kind must be dn");
  check_same_truncation(dn.N, f.N, "lambda_inner");
  check_same_truncation(dn.N, g.N, "lambda_inner");
  if (!f.is_mean_zero())
    throw NotMeanZero("lambda_inner: first argument has constant component " +
                      format_g17(std::abs(f.c(0))));
  if (!g.is_mean_zero())
    throw NotMeanZero("lambda_inner: second argument has constant component " +
                      format_g17(std::abs(g.c(0))));
  return kTwoPi * (g.coeff.adjoint() * (dn.mat * f.coeff))(0);
}

double operator_distance(const BoundaryOperator& A, const BoundaryOperator& B) {
  check_same_truncation(A.N, B.N, "operator_distance");
  const int N = A.N;
  Eigen::MatrixXcd D = A.mat - B.mat;
  for (int k = -N; k <= N; ++k) D.col(k + N) /= std::sqrt(1.0 + double(k) * k);
  if (D.norm() == 0.0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
  return svd.singularValues()(0);
}

void save_operator(const std::filesystem::path& file, const BoundaryOperator& op) {
  std::ostringstream out;
  out << "N=" << op.N << "\n";
  const int n = op.size();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c) out << ",";
      out << format_complex(op.mat(r, c));
    }
    out << "\n";
  }
  write_text_file(file, out.str());
  auto meta = op.meta;
  meta["kind"] = operator_kind_name(op.kind);
  write_key_values(file.string() + ".meta", meta);
}

BoundaryOperator load_operator(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  if (!std::getline(in, line) || line.rfind("N=", 0) != 0)
    throw ParseError("operator file must start with N=<int>: " + file.string());
  const int N = static_cast<int>(parse_double(line.substr(2)));
  if (N < 0) throw ParseError("negative truncation in " + file.string());
  BoundaryOperator op(N, OperatorKind::general);
  const int n = op.size();
  for (int r = 0; r < n; ++r) {
    if (!std::getline(in, line))
      throw ParseError("operator file truncated at row " + std::to_string(r));
    const auto cells = split(trim(line), ',');
    if (static_cast<int>(cells.size()) != n)
      throw ParseError("row " + std::to_string(r) + " has " +
                       std::to_string(cells.size()) + " entries, expected " +
                       std::to_string(n));
    for (int c = 0; c < n; ++c) op.mat(r, c) = parse_complex(cells[c]);
  }
  const auto meta_path = std::filesystem::path(file.string() + ".meta");
  if (std::filesystem::exists(meta_path)) {
    op.meta = read_key_values(meta_path);
    if (auto it = op.meta.find("kind"); it != op.meta.end())
      op.kind = operator_kind_from_name(it->second);
  }
  return op;
}

void save_function(const std::filesystem::path& file, const BoundaryFunction& f) {
  std::ostringstream out;
  out << "N=" << f.N << "\n";
  for (int i = 0; i < f.size(); ++i) out << format_complex(f.coeff(i)) << "\n";
  write_text_file(file, out.str());
}

BoundaryFunction load_function(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  if (!std::getline(in, line) || line.rfind("N=", 0) != 0)
    throw ParseError("function file must start with N=<int>: " + file.string());
  const int N = static_cast<int>(parse_double(line.substr(2)));
  BoundaryFunction f(N);
  for (int i = 0; i < f.size(); ++i) {
    if (!std::getline(in, line))
      throw ParseError("function file truncated: " + file.string());
    f.coeff(i) = parse_complex(trim(line));
  }
  return f;
}

}  // namespace dnlab
