#include "dnlab/periods.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "dnlab/errors.hpp"
#include "dnlab/io.hpp"

namespace dnlab {

namespace {

// Pseudo-inverse of the dn matrix on mean-zero modes (zero on constants).
Eigen::VectorXcd apply_dn_pinv(const BoundaryOperator& dn, const Eigen::VectorXcd& v) {
  int dim = dn.size(), N = dn.N;
  Eigen::MatrixXcd sub(dim - 1, dim - 1);
  Eigen::VectorXcd rhs(dim - 1);
  for (int j = 0, js = 0; j < dim; ++j) {
    if (j == N) continue;
    rhs(js) = v(j);
    for (int k = 0, ks = 0; k < dim; ++k) {
      if (k == N) continue;
      sub(js, ks++) = dn.mat(j, k);
    }
    ++js;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(dim - 2) <= 1e-12)
    throw SingularDN("dn map singular on mean-zero modes (sigma_min=" +
                     format_g17(svd.singularValues()(dim - 2)) + ")");
  Eigen::VectorXcd xs = svd.solve(rhs);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
  for (int j = 0, js = 0; j < dim; ++j) {
    if (j == N) continue;
    x(j) = xs(js++);
  }
  return x;
}

}  // namespace

ExtractCResult extract_c(const BoundaryOperator& dn, const SpectralData& spectral,
                         const BoundaryFunction& trace, double residual_tol) {
  if (!spectral.mu.has_value())
    throw ConfigError("spectral data carries no discrete eigenvalue");
  if (trace.size() != dn.size())
    throw TruncationMismatch("trace truncation does not match the operator");
  if (!trace.is_mean_zero(1e-10 * std::max(trace.norm(), 1.0)))
    throw NotMeanZero("trace must be mean-zero");
  double mu = *spectral.mu;

  BoundaryFunction ftilde;
  ftilde.N = dn.N;
  ftilde.coeff = -apply_dn_pinv(dn, trace.coeff) / (1.0 - mu * mu);
  Complex c = lambda_inner(dn, ftilde, spectral.eta);

  // Distance to the full two-dimensional range span{L eta, L eta-bar}.
  Eigen::VectorXcd b1 = dn.mat * spectral.eta.coeff;
  Eigen::VectorXcd b2 = dn.mat * spectral.eta.conjugated().coeff;
  Eigen::MatrixXcd B(dn.size(), 2);
  B.col(0) = b1;
  B.col(1) = b2;
  Eigen::VectorXcd proj = B * B.colPivHouseholderQr().solve(trace.coeff);
  double residual = (trace.coeff - proj).norm() / std::max(trace.norm(), 1e-300);
  if (residual > residual_tol)
    throw LargeResidual("trace outside the harmonic range: residual " +
                        format_g17(residual));
  return {c, residual};
}

BcalResult bcal_from_boundary(double mu, Complex c_a, Complex c_b, bool strict,
                              double threshold) {
  if (!(mu > 0 && mu < 1)) throw ConfigError("mu must lie in (0,1)");
  double w = 2.0 * (1.0 - mu * mu);
  double re = (c_a * std::conj(c_b)).real();
  double im = (c_a * std::conj(c_b)).imag();
  BcalResult r;
  r.bcal(0, 0) = -w * re;
  r.bcal(1, 1) = w * re;
  r.bcal(0, 1) = -w * std::norm(c_b);
  r.bcal(1, 0) = w * std::norm(c_a);
  r.normalization_defect = std::abs(2.0 * mu * (mu * mu - 1.0) * im - 1.0);
  if (strict && r.normalization_defect > threshold)
    throw NormalizationViolated("pairing normalization defect " +
                                format_g17(r.normalization_defect));
  return r;
}

Eigen::Matrix2d bcal_from_interior(const SurfaceModel& S, const DiscreteForm& va,
                                   const DiscreteForm& vb) {
  Eigen::Matrix2d B;
  B(0, 0) = period_integral(S, va, 'a', true);
  B(0, 1) = period_integral(S, vb, 'a', true);
  B(1, 0) = period_integral(S, va, 'b', true);
  B(1, 1) = period_integral(S, vb, 'b', true);
  return B;
}

std::pair<Complex, Complex> dual_abelian_coeffs(const Eigen::Matrix2d& bcal) {
  if (bcal(0, 1) == 0.0) throw DivisionByZero("Bcal_ab vanishes");
  Complex e_a(0.0, -0.5);
  Complex e_b = (Complex(0.0, 1.0) * bcal(0, 0) - 1.0) / (2.0 * bcal(0, 1));
  return {e_a, e_b};
}

std::pair<Complex, Complex> dual_normalization_periods(const Eigen::Matrix2d& bcal,
                                                       Complex e_a, Complex e_b) {
  Complex i(0.0, 1.0);
  Complex plus = e_a * (-bcal(0, 0) + i) + e_b * (-bcal(0, 1));
  Complex minus = e_a * (-bcal(0, 0) - i) + e_b * (-bcal(0, 1));
  return {plus, minus};
}

SiegelData assemble_siegel(double mu, const Eigen::Matrix2d& bcal) {
  if (!(mu > 0 && mu < 1)) throw ConfigError("mu must lie in (0,1)");
  double ab = bcal(0, 1);
  if (ab == 0.0) throw DivisionByZero("Bcal_ab vanishes");
  double mu2 = mu * mu;
  SiegelData s;
  s.gamma = bcal(1, 1) / (mu2 * ab);
  s.delta = -(mu2 + 1.0) / (2.0 * mu2 * ab);
  s.beta = -(mu2 - 1.0) / (2.0 * mu2 * ab);
  if (!(s.delta > 0.0) || !(s.delta > std::abs(s.beta)))
    throw NotSiegel("imaginary part not positive definite: delta " +
                    format_g17(s.delta) + ", beta " + format_g17(s.beta));
  Complex i(0.0, 1.0);
  s.B << s.gamma + i * s.delta, i * s.beta, i * s.beta, -s.gamma + i * s.delta;
  return s;
}

DomainReport in_fundamental_domain(double gamma, double delta, double beta) {
  DomainReport r;
  r.gamma_low_slack = gamma;
  r.gamma_high_slack = 0.5 - gamma;
  r.delta_slack = delta * delta - (1.0 - gamma * gamma + beta * beta);
  r.pd_slack = delta * delta - beta * beta;
  r.inside = r.gamma_low_slack >= 0 && r.gamma_high_slack >= 0 && r.delta_slack >= 0 &&
             r.pd_slack > 0;
  return r;
}

NormalizeResult normalize_symmetric(double gamma, double delta, double beta) {
  NormalizeResult r;
  r.delta = delta;
  r.gamma = gamma;
  r.beta = beta;
  long n = lround(-std::floor(r.gamma));
  if (n != 0) {
    r.gamma += double(n);
    r.moves.push_back("gamma+=" + std::to_string(n));
  }
  if (r.gamma > 0.5) {
    r.gamma = -r.gamma;
    r.moves.push_back("gamma=-gamma");
    r.gamma += 1.0;
    r.moves.push_back("gamma+=1");
  }
  if (r.beta < 0) {
    r.beta = -r.beta;
    r.moves.push_back("beta=-beta");
  }
  r.reduction_incomplete = !in_fundamental_domain(r.gamma, r.delta, r.beta).inside;
  return r;
}

std::array<double, 3> apply_moves(double gamma, double delta, double beta,
                                  const std::vector<std::string>& moves) {
  for (const std::string& m : moves) {
    if (m == "gamma=-gamma") gamma = -gamma;
    else if (m == "beta=-beta") beta = -beta;
    else if (m.rfind("gamma+=", 0) == 0) gamma += parse_double(m.substr(7));
    else throw ParseError("unknown move: " + m);
  }
  return {gamma, delta, beta};
}

void save_period_data(const std::filesystem::path& file, const PeriodData& p) {
  std::map<std::string, std::string> kv;
  kv["mu"] = format_g17(p.mu);
  kv["c_a"] = format_complex(p.c_a);
  kv["c_b"] = format_complex(p.c_b);
  kv["bcal_aa"] = format_g17(p.bcal(0, 0));
  kv["bcal_ab"] = format_g17(p.bcal(0, 1));
  kv["bcal_ba"] = format_g17(p.bcal(1, 0));
  kv["bcal_bb"] = format_g17(p.bcal(1, 1));
  kv["gamma"] = format_g17(p.gamma);
  kv["delta"] = format_g17(p.delta);
  kv["beta"] = format_g17(p.beta);
  kv["e_a"] = format_complex(p.e_a);
  kv["e_b"] = format_complex(p.e_b);
  write_key_values(file, kv);
}

PeriodData load_period_data(const std::filesystem::path& file) {
  auto kv = read_key_values(file);
  PeriodData p;
  p.mu = parse_double(kv.at("mu"));
  p.c_a = parse_complex(kv.at("c_a"));
  p.c_b = parse_complex(kv.at("c_b"));
  p.bcal(0, 0) = parse_double(kv.at("bcal_aa"));
  p.bcal(0, 1) = parse_double(kv.at("bcal_ab"));
  p.bcal(1, 0) = parse_double(kv.at("bcal_ba"));
  p.bcal(1, 1) = parse_double(kv.at("bcal_bb"));
  p.gamma = parse_double(kv.at("gamma"));
  p.delta = parse_double(kv.at("delta"));
  p.beta = parse_double(kv.at("beta"));
  p.e_a = parse_complex(kv.at("e_a"));
  p.e_b = parse_complex(kv.at("e_b"));
  return p;
}

void save_siegel_matrix(const std::filesystem::path& file, const Eigen::Matrix2cd& B) {
  std::ostringstream os;
  for (int r = 0; r < 2; ++r)
    os << format_complex(B(r, 0)) << ", " << format_complex(B(r, 1)) << "\n";
  write_text_file(file, os.str());
}

Eigen::Matrix2cd load_siegel_matrix(const std::filesystem::path& file) {
  std::istringstream is(read_text_file(file));
  Eigen::Matrix2cd B;
  std::string line;
  for (int r = 0; r < 2; ++r) {
    if (!std::getline(is, line)) throw ParseError("truncated matrix file");
    auto parts = split(line, ',');
    if (parts.size() != 2) throw ParseError("bad matrix row: " + line);
    B(r, 0) = parse_complex(trim(parts[0]));
    B(r, 1) = parse_complex(trim(parts[1]));
  }
  return B;
}

}  // namespace dnlab
