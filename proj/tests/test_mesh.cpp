#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "dnlab/errors.hpp"
#include "dnlab/mesh.hpp"

using namespace dnlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path p = fs::temp_directory_path() / ("dnlab-mesh-" + std::to_string(std::rand()));
  fs::create_directories(p);
  return p;
}

double total_area(const SurfaceModel& S) {
  double a = 0;
  for (int t = 0; t < int(S.triangles.size()); ++t) a += S.triangle_area(t);
  return a;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("cell edge distance") {
  CHECK(torus_d_edge({0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(torus_d_edge({0.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-12));
  Complex tau{0.3, 1.2};
  CHECK(torus_d_edge(tau) == doctest::Approx(0.6 / std::abs(tau)).epsilon(1e-12));
}

TEST_CASE("lattice coordinates invert the embedding") {
  Complex tau{0.25, 1.4};
  Eigen::Vector2d p(0.37 + 0.81 * 0.25, 0.81 * 1.4);
  Eigen::Vector2d st = lattice_coords(tau, p);
  CHECK(st.x() == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(st.y() == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("holed torus mesh is conforming with chi = -1") {
  for (auto [tr, ti, eps] : {std::tuple{0.0, 1.0, 0.2}, {0.3, 1.5, 0.1}}) {
    SurfaceModel S = build_mesh({tr, ti}, eps, 0.15);
    CHECK(S.euler_characteristic() == -1);
    CHECK(total_area(S) ==
          doctest::Approx(ti - std::numbers::pi * eps * eps).epsilon(5e-3));
  }
}

TEST_CASE("hole boundary follows phi = -arg(z - c)") {
  Complex tau{0.0, 1.0};
  double eps = 0.2;
  SurfaceModel S = build_mesh(tau, eps, 0.2);
  Eigen::Vector2d c(0.5, 0.5);
  REQUIRE(S.boundary_vertices.size() == S.boundary_phi.size());
  for (size_t j = 0; j < S.boundary_vertices.size(); ++j) {
    double phi = S.boundary_phi[j];
    Eigen::Vector2d z = S.vertices[S.boundary_vertices[j]] - c;
    CHECK(z.x() == doctest::Approx(eps * std::cos(phi)).epsilon(1e-10));
    CHECK(z.y() == doctest::Approx(-eps * std::sin(phi)).epsilon(1e-10));
    if (j > 0) CHECK(S.boundary_phi[j] > S.boundary_phi[j - 1]);
  }
}

TEST_CASE("boundary resolution floor is honored") {
  SurfaceModel S = build_mesh({0.0, 1.0}, 0.1, 0.2, 200);
  CHECK(int(S.boundary_vertices.size()) >= 200);
}

TEST_CASE("quotient merges the cell seams") {
  SurfaceModel S = build_mesh({0.0, 1.0}, 0.2, 0.15);
  int dup = int(S.vertices.size()) - S.n_canon;
  // Each glued side pair shares one chain of vertices; the four corners
  // collapse to a single class.
  CHECK(dup > 0);
  CHECK(S.canon[S.cycle_a.front()] == S.canon[S.cycle_a.back()]);
  CHECK(S.canon[S.cycle_b.front()] == S.canon[S.cycle_b.back()]);
}

TEST_CASE("oversized hole is rejected") {
  CHECK_THROWS_AS(build_mesh({0.0, 1.0}, 0.43, 0.1), GeometryError);
  CHECK_THROWS_AS(build_mesh({0.0, 1.0}, 0.6, 0.1), GeometryError);
  CHECK_THROWS_AS(build_mesh({0.0, 1.0}, -0.1, 0.1), GeometryError);
  CHECK_THROWS_AS(build_mesh({0.0, -1.0}, 0.1, 0.1), GeometryError);
  CHECK_THROWS_AS(build_mesh({0.0, 1.0}, 0.1, 0.0), GeometryError);
  CHECK_NOTHROW(build_mesh({0.0, 1.0}, 0.42, 0.1));
}

TEST_CASE("disk mesh basics") {
  SurfaceModel S = build_disk_mesh(0.1);
  CHECK(S.euler_characteristic() == 1);
  CHECK(total_area(S) == doctest::Approx(std::numbers::pi).epsilon(1e-2));
  for (size_t j = 0; j < S.boundary_vertices.size(); ++j) {
    Eigen::Vector2d z = S.vertices[S.boundary_vertices[j]];
    CHECK(std::atan2(z.y(), z.x()) ==
          doctest::Approx(std::remainder(S.boundary_phi[j], 2 * std::numbers::pi))
              .epsilon(1e-10));
    CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("closed torus mesh basics") {
  SurfaceModel S = build_closed_torus({0.0, 1.0}, 0.21);
  CHECK(S.euler_characteristic() == 0);
  CHECK(total_area(S) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(S.boundary_vertices.empty());
}

TEST_CASE("annulus mesh basics") {
  SurfaceModel S = build_annulus_mesh(0.1, 1.0, 0.1);
  CHECK(S.euler_characteristic() == 0);
  CHECK(total_area(S) ==
        doctest::Approx(std::numbers::pi * (1.0 - 0.01)).epsilon(1e-2));
  CHECK(!S.inner_boundary_vertices.empty());
  for (int v : S.inner_boundary_vertices)
    CHECK(S.vertices[v].norm() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("finalize rejects broken meshes") {
  SUBCASE("flipped triangle") {
    SurfaceModel S;
    S.vertices = {{0, 0}, {1, 0}, {0, 1}};
    S.triangles = {{0, 2, 1}};
    CHECK_THROWS_AS(S.finalize(), MeshError);
  }
  SUBCASE("edge shared by three triangles") {
    SurfaceModel S;
    S.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}};
    S.triangles = {{0, 1, 2}, {0, 1, 3}, {1, 0, 4}};
    CHECK_THROWS_AS(S.finalize(), MeshError);
  }
  SUBCASE("unreported boundary") {
    SurfaceModel S;
    S.vertices = {{0, 0}, {1, 0}, {0, 1}};
    S.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(S.finalize(), MeshError);
  }
  SUBCASE("identification that is not a translation") {
    SurfaceModel S;
    S.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    S.triangles = {{0, 1, 2}, {1, 3, 2}};
    S.identifications = {{0, 1, 3, 2}};
    CHECK_THROWS_AS(S.finalize(), MeshError);
  }
}

TEST_CASE("mesh file round trip") {
  fs::path dir = temp_dir();
  SurfaceModel S = build_mesh({0.1, 1.1}, 0.15, 0.18);
  save_mesh(dir / "m.txt", S);
  SurfaceModel T = load_mesh(dir / "m.txt");
  REQUIRE(T.vertices.size() == S.vertices.size());
  REQUIRE(T.triangles.size() == S.triangles.size());
  CHECK(T.kind == S.kind);
  CHECK(T.tau == S.tau);
  CHECK(T.eps == S.eps);
  for (size_t i = 0; i < S.vertices.size(); ++i) {
    CHECK(T.vertices[i].x() == S.vertices[i].x());
    CHECK(T.vertices[i].y() == S.vertices[i].y());
  }
  CHECK(T.n_canon == S.n_canon);
  CHECK(T.euler_characteristic() == -1);
  CHECK(T.boundary_phi == S.boundary_phi);
  CHECK(T.cycle_a == S.cycle_a);
  CHECK(T.cycle_b == S.cycle_b);
  fs::remove_all(dir);
}

TEST_CASE("mesh loader rejects junk") {
  fs::path dir = temp_dir();
  write_text_file(dir / "bad.txt", "not a mesh\n");
  CHECK_THROWS_AS(load_mesh(dir / "bad.txt"), ParseError);
  write_text_file(dir / "bad2.txt", "# dnlab-mesh kind=disk\nv 0 oops\n");
  CHECK_THROWS_AS(load_mesh(dir / "bad2.txt"), ParseError);
  fs::remove_all(dir);
}

}  // TEST_SUITE
