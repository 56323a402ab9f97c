#include "dnlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "dnlab/errors.hpp"
#include "dnlab/io.hpp"

namespace dnlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Median of consecutive gaps of an ascending list; 0 if fewer than 2 values.
double median_gap(const std::vector<double>& sorted) {
  if (sorted.size() < 2) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(sorted.size() - 1);
  for (size_t i = 1; i < sorted.size(); ++i) gaps.push_back(sorted[i] - sorted[i - 1]);
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

// A candidate is admissible when it is isolated from every other eigenvalue
// by much more than the typical spectral spacing. The smeared +-1 cluster
// members set that typical spacing (they are 2(N-1) of the 2N eigenvalues),
// so each of them fails the test while a genuine discrete eigenvalue passes
// as a spacing outlier.
bool separated(double isolation, double typical_gap) {
  return isolation >= std::max(10.0 * typical_gap, 1e-6);
}
}  // namespace

SpectralData extract_mu(const BoundaryOperator& dn, double band_lo, double band_hi) {
  if (dn.kind != OperatorKind::dn) throw Error("extract_mu: operator kind must be dn");
  const int N = dn.N;
  const int m = 2 * N;

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
  Eigen::MatrixXcd B(m, m);
  {
    int r = 0;
    for (int k = -N; k <= N; ++k) {
      if (k == 0) continue;
      A(r, r) = double(k);
      ++r;
    }
  }
  for (int r = 0, rr = 0; r < 2 * N + 1; ++r) {
    if (r == N) continue;
    for (int c = 0, cc = 0; c < 2 * N + 1; ++c) {
      if (c == N) continue;
      B(rr, cc) = dn.mat(r, c);
      ++cc;
    }
    ++rr;
  }
  B = (B + B.adjoint().eval()) / 2.0;

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bs(B, Eigen::EigenvaluesOnly);
    if (bs.eigenvalues()(0) <= 1e-12)
      throw SingularDN("extract_mu: DN map not positive definite on mean-zero subspace "
                       "(lambda_min=" + format_g17(bs.eigenvalues()(0)) + ")");
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(A, B);
  if (ges.info() != Eigen::Success)
    throw SolverError("extract_mu: generalized eigensolver failed");

  SpectralData out;
  out.eigenvalues.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + m);
  std::vector<double>& ev = out.eigenvalues;  // ascending by construction

  // Candidates inside the band, each tested against the global gap scale.
  const double typical_gap = median_gap(ev);
  std::vector<int> accepted;
  for (int i = 0; i < m; ++i) {
    const double lam = ev[i];
    if (lam <= band_lo || lam >= band_hi) continue;
    double isolation = std::numeric_limits<double>::infinity();
    if (i > 0) isolation = std::min(isolation, lam - ev[i - 1]);
    if (i + 1 < m) isolation = std::min(isolation, ev[i + 1] - lam);
    if (separated(isolation, typical_gap)) accepted.push_back(i);
  }

  if (accepted.size() > 1) {
    std::string vals;
    for (int i : accepted) vals += (vals.empty() ? "" : ", ") + format_g17(ev[i]);
    throw MultipleCandidates("extract_mu: " + std::to_string(accepted.size()) +
                             " eigenvalues in band: " + vals);
  }

  if (accepted.empty()) return out;

  const int idx = accepted[0];
  out.mu = ev[idx];
  if (idx + 1 < m) out.cluster_gaps.push_back(ev[idx + 1] - ev[idx]);

  // Matching negative eigenvalue (mirror candidate) for the pair defect.
  {
    double best = std::numeric_limits<double>::infinity();
    int neg = -1;
    for (int i = 0; i < m; ++i) {
      if (ev[i] >= -band_hi && ev[i] <= -band_lo && std::abs(ev[i] + *out.mu) < best) {
        best = std::abs(ev[i] + *out.mu);
        neg = i;
      }
    }
    if (neg >= 0) {
      out.pair_defect = std::abs(ev[neg] + *out.mu);
      if (neg > 0) out.cluster_gaps.push_back(ev[neg] - ev[neg - 1]);
    }
  }

  // Embed the eigenvector, normalize (Lambda eta, eta) = 1, fix the phase.
  Eigen::VectorXcd x = ges.eigenvectors().col(idx);  // x^H B x = 1
  BoundaryFunction eta(N);
  for (int k = -N, r = 0; k <= N; ++k) {
    if (k == 0) continue;
    eta.c(k) = x(r++);
  }
  eta.coeff /= std::sqrt(kTwoPi);
  int imax = 0;
  for (int i = 1; i < eta.size(); ++i)
    if (std::abs(eta.coeff(i)) > std::abs(eta.coeff(imax))) imax = i;
  const Complex lead = eta.coeff(imax);
  if (std::abs(lead) > 0) eta.coeff *= std::abs(lead) / lead;
  out.eta = eta;
  return out;
}

BoundaryOperator make_synthetic_dn(double mu, int N) {
  if (!(mu > 0.0 && mu < 1.0))
    throw Error("make_synthetic_dn: mu must lie in (0,1)");
  if (N < 1) throw Error("make_synthetic_dn: need N >= 1");
  const double inv = 1.0 / (mu * mu);
  double a, b;
  if (inv < 4.0) {
    a = 2.0;
    b = std::sqrt(4.0 - inv);
  } else {
    a = std::sqrt(inv + 1.0);
    b = 1.0;
  }
  BoundaryOperator op = dn_disk(N);
  op.mat(N + 1, N + 1) = a;
  op.mat(N - 1, N - 1) = a;
  op.mat(N + 1, N - 1) = b;
  op.mat(N - 1, N + 1) = b;
  op.meta["family"] = "synthetic";
  op.meta["mu"] = format_g17(mu);
  return op;
}

double smoothing_defect(const BoundaryOperator& dn) {
  const auto H = hilbert_from_dn(dn);
  const int N = dn.N;
  const int m = 2 * N;
  const Eigen::MatrixXcd M = H.mat * H.mat + Eigen::MatrixXcd::Identity(2 * N + 1, 2 * N + 1);
  Eigen::MatrixXcd S(m, m);
  for (int r = 0, rr = 0; r < 2 * N + 1; ++r) {
    if (r == N) continue;
    for (int c = 0, cc = 0; c < 2 * N + 1; ++c) {
      if (c == N) continue;
      S(rr, cc) = M(r, c);
      ++cc;
    }
    ++rr;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
  const auto& sv = svd.singularValues();
  if (sv(0) < 1e-300) return 0.0;
  double tail = 0.0;
  for (int i = 2; i < sv.size(); ++i) tail += sv(i);
  return tail / sv(0);
}

}  // namespace dnlab
