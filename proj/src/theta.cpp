#include "dnlab/theta.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dnlab/errors.hpp"

namespace dnlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Smallest eigenvalue of the symmetric 2x2 imaginary part; NotSiegel when
// the matrix is not a Siegel point.
double validated_lambda_min(const Eigen::Matrix2cd& B) {
  double scale = B.cwiseAbs().maxCoeff();
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw NotSiegel("period matrix not symmetric");
  const double p = B(0, 0).imag(), q = B(1, 1).imag(), r = B(0, 1).imag();
  const double mean = 0.5 * (p + q);
  const double rad = std::sqrt(0.25 * (p - q) * (p - q) + r * r);
  const double lmin = mean - rad;
  if (!(lmin > 0)) throw NotSiegel("imaginary part not positive definite");
  return lmin;
}

// Dropped terms past radius R: the shell ||n||_inf = s holds 8s points, each
// of modulus <= exp(-pi lambda_min (s - 1/2)^2) since ||n + a||_2 >= s - 1/2.
double gaussian_tail(double lambda_min, int R) {
  double tail = 0;
  for (int s = R + 1;; ++s) {
    const double t = 8.0 * s * std::exp(-kPi * lambda_min * (s - 0.5) * (s - 0.5));
    tail += t;
    if (t < 1e-17 * (tail + 1e-300) || s > R + 4000) break;
  }
  return tail;
}

Complex shell_sum(const Eigen::Matrix2cd& B, double a1, double a2, double b1,
                  double b2, int s) {
  const Complex ipi(0, kPi);
  Complex acc(0, 0);
  auto term = [&](int n1, int n2) {
    const double z1 = n1 + a1, z2 = n2 + a2;
    const Complex q = B(0, 0) * (z1 * z1) + 2.0 * B(0, 1) * (z1 * z2) +
                      B(1, 1) * (z2 * z2);
    acc += std::exp(ipi * q + Complex(0, 2 * kPi) * (z1 * b1 + z2 * b2));
  };
  if (s == 0) {
    term(0, 0);
    return acc;
  }
  for (int n1 = -s; n1 <= s; ++n1) {
    if (n1 == -s || n1 == s)
      for (int n2 = -s; n2 <= s; ++n2) term(n1, n2);
    else {
      term(n1, -s);
      term(n1, s);
    }
  }
  return acc;
}

}  // namespace

bool odd_characteristic(const Characteristic& chi) {
  return (chi[0] * chi[2] + chi[1] * chi[3]) % 2 == 1;
}

const std::vector<Characteristic>& even_characteristics() {
  static const std::vector<Characteristic> list = [] {
    std::vector<Characteristic> v;
    for (int m = 0; m < 16; ++m) {
      Characteristic chi{m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1};
      if (!odd_characteristic(chi)) v.push_back(chi);
    }
    return v;
  }();
  return list;
}

ThetaConstant theta_constant(const Eigen::Matrix2cd& B, const Characteristic& chi,
                             double vanishing_tol, int min_R) {
  for (int f : chi)
    if (f != 0 && f != 1) throw ConfigError("characteristic flags must be 0 or 1");
  const double lmin = validated_lambda_min(B);

  ThetaConstant out;
  out.characteristic = chi;
  const double a1 = chi[0] / 2.0, a2 = chi[1] / 2.0;
  const double b1 = chi[2] / 2.0, b2 = chi[3] / 2.0;

  Complex partial(0, 0);
  for (int s = 0;; ++s) {
    if (s > 200)
      throw SlowConvergence("theta truncation radius would exceed 200");
    partial += shell_sum(B, a1, a2, b1, b2, s);
    const double tail = gaussian_tail(lmin, s);
    if (s >= min_R && tail <= 1e-14 * (std::abs(partial) + 1e-300)) {
      out.R = s;
      out.tail_bound = tail;
      break;
    }
  }
  out.value = partial;
  out.vanishing = std::abs(partial) <= vanishing_tol && odd_characteristic(chi);
  return out;
}

std::string theta_csv_header() { return "characteristic,re,im,radius,tail_bound"; }

std::string theta_csv_row(const ThetaConstant& t) {
  std::ostringstream os;
  for (int f : t.characteristic) os << f;
  os << ',' << format_g17(t.value.real()) << ',' << format_g17(t.value.imag())
     << ',' << t.R << ',' << format_g17(t.tail_bound);
  return os.str();
}

RosenhainTriple rosenhain(const Eigen::Matrix2cd& B, double degenerate_tol,
                          int min_R) {
  auto e = [&](int f1, int f2, int f3, int f4) {
    return theta_constant(B, {f1, f2, f3, f4}, 1e-12, min_R).value;
  };
  const Complex e0000 = e(0, 0, 0, 0), e0010 = e(0, 0, 1, 0);
  const Complex e0001 = e(0, 0, 0, 1), e0011 = e(0, 0, 1, 1);
  const Complex e1100 = e(1, 1, 0, 0), e1111 = e(1, 1, 1, 1);

  auto check = [&](Complex v, const char* name) {
    if (std::abs(v) <= degenerate_tol)
      throw NearDegenerate(std::string("denominator theta constant ") + name +
                               " vanishes: |" + name +
                               "| = " + format_g17(std::abs(v)),
                           name);
  };
  check(e0011, "e0011");
  check(e0001, "e0001");
  check(e1111, "e1111");

  auto sq = [](Complex z) { return z * z; };
  RosenhainTriple t;
  t.lambda1 = sq(e0000 * e0010 / (e0011 * e0001));
  t.lambda2 = sq(e0010 * e1100 / (e0001 * e1111));
  t.lambda3 = sq(e0000 * e1100 / (e0011 * e1111));
  return t;
}

DegenerationClassification classify_degeneration(
    const std::vector<std::pair<Eigen::Matrix2cd, double>>& sequence) {
  if (sequence.size() < 3)
    throw InsufficientData("need at least 3 family points");
  for (size_t i = 1; i < sequence.size(); ++i)
    if (!(sequence[i].second > sequence[i - 1].second))
      throw InsufficientData("family eigenvalues must be strictly increasing");

  DegenerationClassification out;
  for (const auto& [B, mu] : sequence) {
    (void)mu;
    DegenerationDiagnostics d;
    d.b_norm = B.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::Matrix2d M = B.imag();
    const double det = M.determinant();
    if (!(det > 0) || !(M.trace() > 0))
      throw NotSiegel("imaginary part not positive definite");
    Eigen::Matrix2d inv;
    inv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
    inv /= det;
    d.im_inv_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
    d.beta_mag = std::abs(B(0, 1));
    out.points.push_back(d);
  }

  auto strictly_decreasing = [](auto get, const std::vector<DegenerationDiagnostics>& v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (!(get(v[i]) < get(v[i - 1]))) return false;
    return true;
  };

  const bool bounded =
      out.points.back().b_norm <= 2.0 * out.points.front().b_norm;
  if (bounded && strictly_decreasing(
                     [](const DegenerationDiagnostics& d) { return d.beta_mag; },
                     out.points))
    out.label = "case-i (homologically trivial pinch)";
  else if (strictly_decreasing(
               [](const DegenerationDiagnostics& d) { return d.im_inv_norm; },
               out.points))
    out.label = "case-ii (homologically nontrivial pinch)";
  else
    out.label = "mixed/undecided";
  return out;
}

}  // namespace dnlab
