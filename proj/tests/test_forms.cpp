#include <doctest.h>

#include <cmath>
#include <random>

#include "dnlab/errors.hpp"
#include "dnlab/forms.hpp"
#include "dnlab/spectral.hpp"

using namespace dnlab;

namespace {

double form_sup_distance(const DiscreteForm& w, const Eigen::Vector2d& v) {
  double d = 0;
  for (const auto& x : w.tri_vec) d = std::max(d, (x - v).norm());
  return d;
}

}  // namespace

TEST_SUITE("forms") {

TEST_CASE("star rotates by +90 degrees") {
  DiscreteForm w;
  w.tri_vec = {{1.0, 0.0}, {0.3, -0.7}};
  DiscreteForm s = star(w);
  CHECK(s.tri_vec[0] == Eigen::Vector2d(0.0, 1.0));
  CHECK(s.tri_vec[1] == Eigen::Vector2d(0.7, 0.3));
  DiscreteForm ss = star(s);
  CHECK((ss.tri_vec[0] + w.tri_vec[0]).norm() == 0.0);
}

TEST_CASE("square torus basis is dx, dy") {
  SurfaceModel S = build_closed_torus({0.0, 1.0}, 0.11);
  auto [va, vb] = harmonic_form_basis(S);
  CHECK(form_sup_distance(va, {1.0, 0.0}) <= 1e-10);
  CHECK(form_sup_distance(vb, {0.0, 1.0}) <= 1e-10);

  CHECK(period_integral(S, va, 'a', false) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(period_integral(S, va, 'b', false)) <= 1e-12);
  // orientation anchor: star(dx) = dy has b-period +1
  CHECK(period_integral(S, va, 'b', true) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(period_integral(S, va, 'a', true)) <= 1e-12);
}

TEST_CASE("skew torus basis has exact dual periods") {
  SurfaceModel S = build_closed_torus({0.3, 1.1}, 0.13);
  auto [va, vb] = harmonic_form_basis(S);
  CHECK(period_integral(S, va, 'a', false) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(period_integral(S, va, 'b', false)) <= 1e-10);
  CHECK(std::abs(period_integral(S, vb, 'a', false)) <= 1e-10);
  CHECK(period_integral(S, vb, 'b', false) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(wedge_integral(S, va, vb) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("holed torus basis: exact periods, zero tangential trace") {
  SurfaceModel S = build_mesh({0.0, 1.0}, 0.05, 0.08);
  auto [va, vb] = harmonic_form_basis(S);
  CHECK(period_integral(S, va, 'a', false) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(period_integral(S, vb, 'a', false)) <= 1e-10);
  CHECK(std::abs(period_integral(S, va, 'b', false)) <= 1e-10);
  CHECK(period_integral(S, vb, 'b', false) == doctest::Approx(1.0).epsilon(1e-10));

  double scale = std::sqrt(form_l2_product(S, va, va));
  for (const DiscreteForm* w : {&va, &vb}) {
    double tang = 0;
    int nb = int(S.boundary_vertices.size());
    for (int j = 0; j < nb; ++j) {
      int u = S.boundary_vertices[j], v = S.boundary_vertices[(j + 1) % nb];
      Eigen::Vector2d e = S.vertices[v] - S.vertices[u];
      auto it = S.edge_tris.find(SurfaceModel::edge_key(S.canon[u], S.canon[v]));
      REQUIRE(it != S.edge_tris.end());
      int t = it->second[0] >= 0 ? it->second[0] : it->second[1];
      tang = std::max(tang, std::abs(w->tri_vec[t].dot(e) / e.norm()));
    }
    CHECK(tang <= 1e-8 * std::max(scale, 1.0));
  }
}

TEST_CASE("riemann bilinear identities on a skew holed torus") {
  SurfaceModel S = build_mesh({0.3, 1.2}, 0.08, 0.07);
  auto [va, vb] = harmonic_form_basis(S);
  DiscreteForm sa = star(va), sb = star(vb);

  auto periods = [&](const DiscreteForm& w, bool st) {
    return std::pair{period_integral(S, w, 'a', st), period_integral(S, w, 'b', st)};
  };
  auto [Aa, Ba] = periods(va, false);
  auto [Ab, Bb] = periods(vb, false);
  auto [Asa, Bsa] = periods(va, true);
  auto [Asb, Bsb] = periods(vb, true);

  double na = std::sqrt(form_l2_product(S, va, va));
  double nb = std::sqrt(form_l2_product(S, vb, vb));

  struct Row {
    double lhs, pa1, pb1, pa2, pb2, scale;
  };
  std::vector<Row> rows = {
      {wedge_integral(S, va, vb), Aa, Ba, Ab, Bb, na * nb},
      {wedge_integral(S, va, sa), Aa, Ba, Asa, Bsa, na * na},
      {wedge_integral(S, va, sb), Aa, Ba, Asb, Bsb, na * nb},
      {wedge_integral(S, vb, sb), Ab, Bb, Asb, Bsb, nb * nb},
  };
  for (const Row& r : rows) {
    double rhs = r.pa1 * r.pb2 - r.pb1 * r.pa2;
    CHECK(std::abs(r.lhs - rhs) <=
          0.02 * std::max({std::abs(r.lhs), std::abs(rhs), r.scale}));
  }
}

TEST_CASE("star period symmetries of the dual basis") {
  SurfaceModel S = build_mesh({0.0, 1.0}, 0.1, 0.07);
  auto [va, vb] = harmonic_form_basis(S);
  double baa = period_integral(S, va, 'a', true);
  double bba = period_integral(S, va, 'b', true);
  double bab = period_integral(S, vb, 'a', true);
  double bbb = period_integral(S, vb, 'b', true);
  double na2 = form_l2_product(S, va, va);
  double nb2 = form_l2_product(S, vb, vb);
  double scale = std::max(std::abs(bab), std::abs(bba));
  CHECK(std::abs(bbb + baa) <= 0.02 * scale);
  CHECK(std::abs(bba - na2) <= 0.02 * na2);
  CHECK(std::abs(bab + nb2) <= 0.02 * nb2);
}

TEST_CASE("degenerate cycle data is reported") {
  SurfaceModel S = build_closed_torus({0.0, 1.0}, 0.2);
  S.cycle_b = S.cycle_a;
  S.finalize();
  CHECK_THROWS_AS(harmonic_form_basis(S), DegenerateBasis);
}

TEST_CASE("hodge split on the exact disk operator") {
  BoundaryOperator dn = dn_disk(16);
  SurfaceModel dummy;
  std::mt19937 rng(77);
  std::normal_distribution<double> dist;
  BoundaryFunction f(16);
  for (int k = -16; k <= 16; ++k)
    if (k != 0) f.c(k) = Complex(dist(rng), dist(rng));
  auto [h, trace] = hodge_decompose(dummy, dn, f);
  CHECK(trace.norm() <= 1e-10 * f.norm());
  // h = Hf rotates modes: -i sign(k) f_k
  for (int k = -16; k <= 16; ++k) {
    Complex want = (k > 0) ? Complex(0, -1) * f.c(k)
                           : (k < 0 ? Complex(0, 1) * f.c(k) : Complex(0, 0));
    CHECK(std::abs(h.c(k) - want) <= 1e-10);
  }
}

TEST_CASE("hodge split on the synthetic genus-1 model") {
  BoundaryOperator dn = make_synthetic_dn(0.6, 16);
  SpectralData sd = extract_mu(dn);
  REQUIRE(sd.mu.has_value());
  SurfaceModel dummy;
  auto [h, trace] = hodge_decompose(dummy, dn, sd.eta);
  double mu = *sd.mu;
  Eigen::VectorXcd want = -(1.0 - mu * mu) * (dn.mat * sd.eta.coeff);
  CHECK((trace.coeff - want).norm() <= 1e-8 * want.norm());
}

TEST_CASE("hodge split rejects constants") {
  BoundaryOperator dn = dn_disk(8);
  BoundaryFunction f(8);
  f.c(0) = 1.0;
  SurfaceModel dummy;
  CHECK_THROWS_AS(hodge_decompose(dummy, dn, f), NotMeanZero);
}

}  // TEST_SUITE
