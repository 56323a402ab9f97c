#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <filesystem>
#include <unordered_map>
#include <vector>

#include "dnlab/io.hpp"

namespace dnlab {

enum class MeshKind { torus_hole, disk, closed_torus, annulus };

std::string mesh_kind_name(MeshKind k);
MeshKind mesh_kind_from_name(const std::string& name);

// Triangulated surface. Vertices carry raw planar coordinates; the torus
// gluing is realized by identification pairs, so every triangle is planar in
// the fundamental-domain chart and all geometry (areas, gradients) is read
// from raw coordinates. `canon` maps raw vertex ids to quotient dofs.
struct SurfaceModel {
  MeshKind kind = MeshKind::disk;
  Complex tau{0.0, 1.0};   // lattice modulus (torus kinds)
  double eps = 0.0;        // hole radius (torus_hole), inner radius (annulus)
  double outer_radius = 1.0;  // disk / annulus outer radius
  double h_target = 0.0;

  std::vector<Eigen::Vector2d> vertices;          // raw coordinates
  std::vector<std::array<int, 3>> triangles;      // raw ids, ccw
  struct EdgePair {
    int a, b, c, d;  // edge (a,b) glued to edge (c,d); a~c, b~d
  };
  std::vector<EdgePair> identifications;  // the torus cut graph

  std::vector<int> boundary_vertices;  // raw ids in increasing-phi order
  std::vector<double> boundary_phi;    // strictly increasing in [0, 2pi)
  std::vector<int> inner_boundary_vertices;  // annulus only (second contour)

  std::vector<int> cycle_a, cycle_b;  // raw vertex paths, closed after gluing

  // Derived by finalize():
  std::vector<int> canon;  // raw id -> quotient id
  int n_canon = 0;
  std::unordered_map<uint64_t, std::array<int, 2>> edge_tris;  // quotient edge -> tris

  static uint64_t edge_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (uint64_t(uint32_t(u)) << 32) | uint32_t(v);
  }

  // Builds the quotient map and adjacency, then checks orientation,
  // conformity, boundary structure and cycle closedness. MeshError on any
  // violation.
  void finalize();

  double triangle_area(int t) const;
  // Gradients of the three barycentric functions of triangle t.
  std::array<Eigen::Vector2d, 3> barycentric_gradients(int t) const;

  int euler_characteristic() const;  // V - E + F on the quotient
};

// Distance from the cell center (1+tau)/2 to the nearest cell edge.
double torus_d_edge(Complex tau);

// Lattice coordinates (s,t) with z = s + t*tau.
Eigen::Vector2d lattice_coords(Complex tau, const Eigen::Vector2d& p);

// Flat torus C/(Z + tau Z) minus the disk of radius eps at the cell center.
// The hole circle is resolved by max(64, ceil(8 pi eps/h_target),
// min_boundary_segments) segments; boundary angles follow phi = -arg(z - c),
// the disk-like parametrization of the hole seen through w = eps/(z-c).
// GeometryError if the hole does not embed (eps >= 0.85 * d_edge).
SurfaceModel build_mesh(Complex tau, double eps, double h_target,
                        int min_boundary_segments = 0);

// Unit disk, boundary angles phi = arg(z).
SurfaceModel build_disk_mesh(double h_target, int min_boundary_segments = 0);

// Flat torus without a hole (sanity meshes for harmonic-form tests).
SurfaceModel build_closed_torus(Complex tau, double h_target);

// Round annulus r_in < |z| < r_out, log-graded radially.
SurfaceModel build_annulus_mesh(double r_in, double r_out, double h_target);

// Text format: "# dnlab-mesh key=value ..." header, then lines
// "v x y", "t i j k", "p a b c d", "b i phi", "c a i" / "c b i".
void save_mesh(const std::filesystem::path& file, const SurfaceModel& S);
SurfaceModel load_mesh(const std::filesystem::path& file);

}  // namespace dnlab
