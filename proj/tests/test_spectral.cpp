#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dnlab/errors.hpp"
#include "dnlab/spectral.hpp"

using namespace dnlab;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("synthetic DN block coefficients") {
  // 1/mu^2 < 4 branch: a = 2, b = sqrt(4 - 1/mu^2).
  const auto op = make_synthetic_dn(0.6, 16);
  CHECK(op.mat(17, 17).real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(op.mat(17, 15).real() == doctest::Approx(1.1055415967851332).epsilon(1e-12));
  CHECK(op.hermitian_defect() < 1e-15);
  // 1/mu^2 >= 4 branch: b = 1, a = sqrt(1/mu^2 + 1).
  const auto op2 = make_synthetic_dn(0.3, 16);
  CHECK(op2.mat(17, 15).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(op2.mat(17, 17).real() ==
        doctest::Approx(std::sqrt(1.0 / 0.09 + 1.0)).epsilon(1e-14));
}

TEST_CASE("extract_mu recovers prescribed eigenvalues") {
  for (double mu : {0.3, 0.6, 0.9}) {
    const auto sp = extract_mu(make_synthetic_dn(mu, 32));
    REQUIRE(sp.mu.has_value());
    CHECK(std::abs(*sp.mu - mu) < 1e-10);
    CHECK(sp.pair_defect < 1e-10);
  }
}

TEST_CASE("eta is Lambda-normalized with fixed phase") {
  const auto dn = make_synthetic_dn(0.6, 16);
  const auto sp = extract_mu(dn);
  REQUIRE(sp.mu.has_value());
  const auto& eta = sp.eta;

  CHECK(std::abs(lambda_inner(dn, eta, eta) - Complex(1, 0)) < 1e-8);
  CHECK(std::abs(lambda_inner(dn, eta, eta.conjugated())) < 1e-6);

  // Support is exactly the +-1 modes; the ratio matches the 2x2 pencil.
  for (int k = -16; k <= 16; ++k)
    if (k != 1 && k != -1) CHECK(std::abs(eta.c(k)) < 1e-12);
  CHECK(std::abs(eta.c(-1) / eta.c(1) - Complex(-0.30151134457776363, 0)) < 1e-6);

  // Largest coefficient is real positive.
  CHECK(eta.c(1).real() > 0);
  CHECK(std::abs(eta.c(1).imag()) < 1e-12 * std::abs(eta.c(1)));
}

TEST_CASE("eigenproblem residual and conjugate symmetry") {
  const auto dn = make_synthetic_dn(0.6, 16);
  const auto sp = extract_mu(dn);
  REQUIRE(sp.mu.has_value());
  const int N = dn.N;

  auto residual = [&](const BoundaryFunction& v, double lam) {
    Eigen::VectorXcd lhs(v.size()), rhs(v.size());
    for (int k = -N; k <= N; ++k) lhs(k + N) = double(k) * v.c(k);
    rhs = dn.mat * v.coeff;
    return (lhs - lam * rhs).norm() / std::max(rhs.norm(), 1e-300);
  };
  CHECK(residual(sp.eta, *sp.mu) < 1e-8);
  CHECK(residual(sp.eta.conjugated(), -*sp.mu) < 1e-8);
}

TEST_CASE("exact disk operator has no band eigenvalue") {
  const auto sp = extract_mu(dn_disk(32));
  CHECK(!sp.mu.has_value());
  for (double ev : sp.eigenvalues)
    CHECK(std::min(std::abs(ev - 1.0), std::abs(ev + 1.0)) < 1e-12);
}

TEST_CASE("band boundary excludes mu too close to 1") {
  const auto sp = extract_mu(make_synthetic_dn(0.9995, 16));
  CHECK(!sp.mu.has_value());
}

TEST_CASE("two planted eigenvalues trigger MultipleCandidates") {
  auto op = make_synthetic_dn(0.5, 16);
  // Second coupled block on modes +-2 tuned to iH eigenvalues +-0.7:
  // eigenvalues are +-2/sqrt(a^2-b^2), so a^2-b^2 = (2/0.7)^2.
  const double a = 3.0;
  const double b = std::sqrt(a * a - 4.0 / 0.49);
  op.mat(16 + 2, 16 + 2) = a;
  op.mat(16 - 2, 16 - 2) = a;
  op.mat(16 + 2, 16 - 2) = b;
  op.mat(16 - 2, 16 + 2) = b;
  CHECK_THROWS_AS(extract_mu(op), MultipleCandidates);
}

TEST_CASE("smoothing defect vanishes for rank-2 models") {
  CHECK(smoothing_defect(dn_disk(16)) < 1e-12);
  CHECK(smoothing_defect(make_synthetic_dn(0.6, 16)) < 1e-12);
}

TEST_SUITE_END();
