#include "dnlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dnlab/errors.hpp"

namespace dnlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double positive_mod_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  return y;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Strictly increasing angle sequence of length n+1 starting at index `start`,
// closing one full turn above its first entry.
std::vector<double> unwrap_cycle(const std::vector<double>& ang, int start) {
  int n = int(ang.size());
  std::vector<double> u(n + 1);
  u[0] = positive_mod_2pi(ang[start]);
  for (int k = 1; k <= n; ++k) {
    double step = positive_mod_2pi(ang[(start + k) % n] - ang[(start + k - 1) % n]);
    if (step <= 0) throw MeshError("duplicate angle in ring");
    u[k] = u[k - 1] + step;
  }
  return u;
}

// Triangulates the band between two concentric closed rings given in ccw
// order; vertex counts may differ. Appends n_inner + n_outer triangles.
void zip_rings(SurfaceModel& S, const std::vector<int>& inner_ids,
               const std::vector<double>& inner_ang,
               const std::vector<int>& outer_ids,
               const std::vector<double>& outer_ang) {
  int ni = int(inner_ids.size()), no = int(outer_ids.size());
  std::vector<double> ui = unwrap_cycle(inner_ang, 0);
  int o0 = 0;
  double best = 1e300;
  for (int i = 0; i < no; ++i) {
    double d = std::fabs(std::remainder(outer_ang[i] - ui[0], kTwoPi));
    if (d < best) {
      best = d;
      o0 = i;
    }
  }
  std::vector<double> uo = unwrap_cycle(outer_ang, o0);
  double shift = kTwoPi * std::round((ui[0] - uo[0]) / kTwoPi);
  for (double& v : uo) v += shift;

  int ai = 0, bi = 0;
  while (ai < ni || bi < no) {
    bool take_inner = (bi == no) || (ai < ni && ui[ai + 1] <= uo[bi + 1]);
    if (take_inner) {
      S.triangles.push_back(
          {inner_ids[(ai + 1) % ni], inner_ids[ai % ni], outer_ids[(o0 + bi) % no]});
      ++ai;
    } else {
      S.triangles.push_back({inner_ids[ai % ni], outer_ids[(o0 + bi) % no],
                             outer_ids[(o0 + bi + 1) % no]});
      ++bi;
    }
  }
}

void connect_equal_rings(SurfaceModel& S, const std::vector<int>& inner,
                         const std::vector<int>& outer) {
  int n = int(inner.size());
  for (int j = 0; j < n; ++j) {
    int j1 = (j + 1) % n;
    S.triangles.push_back({inner[j], outer[j1], inner[j1]});
    S.triangles.push_back({inner[j], outer[j], outer[j1]});
  }
}

}  // namespace

std::string mesh_kind_name(MeshKind k) {
  switch (k) {
    case MeshKind::torus_hole: return "torus_hole";
    case MeshKind::disk: return "disk";
    case MeshKind::closed_torus: return "closed_torus";
    case MeshKind::annulus: return "annulus";
  }
  throw MeshError("unknown mesh kind");
}

MeshKind mesh_kind_from_name(const std::string& name) {
  if (name == "torus_hole") return MeshKind::torus_hole;
  if (name == "disk") return MeshKind::disk;
  if (name == "closed_torus") return MeshKind::closed_torus;
  if (name == "annulus") return MeshKind::annulus;
  throw MeshError("unknown mesh kind: " + name);
}

double torus_d_edge(Complex tau) {
  // Cell center to the nearest of the four cell edges. The sides 0->1 and
  // tau->1+tau are at distance Im(tau)/2; the sides 0->tau and 1->1+tau are
  // at distance |Im(conj(u) * (c - 0))| with u the unit side direction,
  // which evaluates to Im(tau) / (2 |tau|).
  double im = tau.imag();
  return 0.5 * im * std::min(1.0, 1.0 / std::abs(tau));
}

Eigen::Vector2d lattice_coords(Complex tau, const Eigen::Vector2d& p) {
  double t = p.y() / tau.imag();
  double s = p.x() - t * tau.real();
  return {s, t};
}

double SurfaceModel::triangle_area(int t) const {
  const auto& tr = triangles[t];
  Eigen::Vector2d e1 = vertices[tr[1]] - vertices[tr[0]];
  Eigen::Vector2d e2 = vertices[tr[2]] - vertices[tr[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

std::array<Eigen::Vector2d, 3> SurfaceModel::barycentric_gradients(int t) const {
  const auto& tr = triangles[t];
  double twoA = 2.0 * triangle_area(t);
  std::array<Eigen::Vector2d, 3> g;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector2d e = vertices[tr[(i + 2) % 3]] - vertices[tr[(i + 1) % 3]];
    g[i] = Eigen::Vector2d(-e.y(), e.x()) / twoA;
  }
  return g;
}

void SurfaceModel::finalize() {
  int nv = int(vertices.size());
  if (nv == 0 || triangles.empty()) throw MeshError("empty mesh");
  for (const auto& tr : triangles)
    for (int v : tr)
      if (v < 0 || v >= nv) throw MeshError("triangle references missing vertex");

  for (int t = 0; t < int(triangles.size()); ++t)
    if (!(triangle_area(t) > 0))
      throw MeshError("non-positive triangle area at index " + std::to_string(t));

  UnionFind uf(nv);
  for (const auto& p : identifications) {
    Eigen::Vector2d da = vertices[p.c] - vertices[p.a];
    Eigen::Vector2d db = vertices[p.d] - vertices[p.b];
    if ((da - db).norm() > 1e-9)
      throw MeshError("identified edge pair is not a translation");
    uf.unite(p.a, p.c);
    uf.unite(p.b, p.d);
  }
  canon.assign(nv, -1);
  n_canon = 0;
  for (int i = 0; i < nv; ++i) {
    int r = uf.find(i);
    if (canon[r] < 0) canon[r] = n_canon++;
    canon[i] = canon[r];
  }

  edge_tris.clear();
  for (int t = 0; t < int(triangles.size()); ++t) {
    const auto& tr = triangles[t];
    std::array<int, 3> q{canon[tr[0]], canon[tr[1]], canon[tr[2]]};
    if (q[0] == q[1] || q[1] == q[2] || q[0] == q[2])
      throw MeshError("triangle degenerates under identification");
    for (int e = 0; e < 3; ++e) {
      uint64_t key = edge_key(q[e], q[(e + 1) % 3]);
      auto [it, inserted] = edge_tris.try_emplace(key, std::array<int, 2>{t, -1});
      if (!inserted) {
        if (it->second[1] != -1) throw MeshError("edge with more than two triangles");
        it->second[1] = t;
      }
    }
  }

  std::vector<uint64_t> open_edges;
  for (const auto& [key, tris] : edge_tris)
    if (tris[1] == -1) open_edges.push_back(key);
  std::sort(open_edges.begin(), open_edges.end());

  std::vector<uint64_t> loop_edges;
  auto add_loop = [&](const std::vector<int>& loop) {
    int n = int(loop.size());
    for (int j = 0; j < n; ++j)
      loop_edges.push_back(edge_key(canon[loop[j]], canon[loop[(j + 1) % n]]));
  };
  if (!boundary_vertices.empty()) add_loop(boundary_vertices);
  if (!inner_boundary_vertices.empty()) add_loop(inner_boundary_vertices);
  std::sort(loop_edges.begin(), loop_edges.end());
  if (loop_edges != open_edges)
    throw MeshError("boundary loops do not match single-triangle edges");

  if (!boundary_vertices.empty()) {
    if (boundary_phi.size() != boundary_vertices.size())
      throw MeshError("boundary angle list size mismatch");
    if (boundary_phi.front() < 0 || boundary_phi.back() >= kTwoPi)
      throw MeshError("boundary angles outside [0, 2pi)");
    for (size_t j = 1; j < boundary_phi.size(); ++j)
      if (!(boundary_phi[j] > boundary_phi[j - 1]))
        throw MeshError("boundary angles not strictly increasing");
  }

  auto check_cycle = [&](const std::vector<int>& cyc, const char* name) {
    if (cyc.size() < 2) throw MeshError(std::string("cycle too short: ") + name);
    if (canon[cyc.front()] != canon[cyc.back()])
      throw MeshError(std::string("cycle does not close: ") + name);
    for (size_t j = 0; j + 1 < cyc.size(); ++j) {
      uint64_t key = edge_key(canon[cyc[j]], canon[cyc[j + 1]]);
      if (edge_tris.find(key) == edge_tris.end())
        throw MeshError(std::string("cycle leaves the edge graph: ") + name);
    }
  };
  if (!cycle_a.empty()) check_cycle(cycle_a, "a");
  if (!cycle_b.empty()) check_cycle(cycle_b, "b");
}

int SurfaceModel::euler_characteristic() const {
  return n_canon - int(edge_tris.size()) + int(triangles.size());
}

SurfaceModel build_mesh(Complex tau, double eps, double h_target,
                        int min_boundary_segments) {
  if (!(tau.imag() > 0)) throw GeometryError("tau must have positive imaginary part");
  if (!(h_target > 0)) throw GeometryError("h_target must be positive");
  if (!(eps > 0)) throw GeometryError("hole radius must be positive");
  double d_edge = torus_d_edge(tau);
  if (eps >= 0.85 * d_edge)
    throw GeometryError("hole radius " + format_g17(eps) +
                        " too large for cell (edge distance " + format_g17(d_edge) +
                        ")");

  SurfaceModel S;
  S.kind = MeshKind::torus_hole;
  S.tau = tau;
  S.eps = eps;
  S.h_target = h_target;
  Eigen::Vector2d c(0.5 * (1.0 + tau.real()), 0.5 * tau.imag());

  int n_theta = std::max({64, int(std::ceil(8.0 * std::numbers::pi * eps / h_target)),
                          min_boundary_segments});

  // Graded circular rings around the hole. The radial step starts at the
  // circumferential spacing and grows with the square of the radius ratio,
  // dr(r) = min(dr0 (r/eps)^2, h_target): boundary-layer resolution near the
  // hole is set by the segment count alone, while every cell past the layer
  // scales with h_target, so interior refinement stays second order.
  std::vector<double> radii{eps};
  double r_stop = eps + 0.7 * (0.95 * d_edge - eps);
  double dr0 = std::min(eps * kTwoPi / n_theta, h_target);
  for (;;) {
    double r = radii.back();
    double dr = std::min(dr0 * (r / eps) * (r / eps), h_target);
    if (r + dr > r_stop) break;
    radii.push_back(r + dr);
  }
  int n_rings = int(radii.size());
  std::vector<int> counts(n_rings, n_theta);
  std::vector<std::vector<int>> ring_ids(n_rings);
  std::vector<std::vector<double>> ring_ang(n_rings);
  for (int l = 0; l < n_rings; ++l) {
    ring_ids[l].resize(counts[l]);
    ring_ang[l].resize(counts[l]);
    for (int j = 0; j < counts[l]; ++j) {
      double th = kTwoPi * j / counts[l];
      ring_ids[l][j] = int(S.vertices.size());
      ring_ang[l][j] = th;
      S.vertices.emplace_back(c.x() + radii[l] * std::cos(th),
                              c.y() + radii[l] * std::sin(th));
    }
  }
  for (int l = 0; l + 1 < n_rings; ++l) {
    if (counts[l] == counts[l + 1])
      connect_equal_rings(S, ring_ids[l], ring_ids[l + 1]);
    else
      zip_rings(S, ring_ids[l], ring_ang[l], ring_ids[l + 1], ring_ang[l + 1]);
  }

  // Outer cell boundary polygon, ccw: bottom, right, top, left. At least 3
  // segments per side so that seam edges near the merged corner stay distinct.
  int n1 = std::max(3, int(std::ceil(1.0 / h_target)));
  int n2 = std::max(3, int(std::ceil(std::abs(tau) / h_target)));
  int n_out = 2 * (n1 + n2);
  std::vector<Eigen::Vector2d> poly(n_out);
  auto lat = [&](double s, double t) {
    return Eigen::Vector2d(s + t * tau.real(), t * tau.imag());
  };
  for (int k = 0; k < n1; ++k) poly[k] = lat(double(k) / n1, 0.0);
  for (int k = 0; k < n2; ++k) poly[n1 + k] = lat(1.0, double(k) / n2);
  for (int k = 0; k < n1; ++k) poly[n1 + n2 + k] = lat(1.0 - double(k) / n1, 1.0);
  for (int k = 0; k < n2; ++k) poly[2 * n1 + n2 + k] = lat(0.0, 1.0 - double(k) / n2);

  // Morph rings interpolate from the last circle to the polygon shape.
  double r_last = radii.back();
  std::vector<double> rho(n_out), alpha(n_out);
  double max_gap = 0.0;
  for (int i = 0; i < n_out; ++i) {
    Eigen::Vector2d d = poly[i] - c;
    rho[i] = d.norm();
    alpha[i] = std::atan2(d.y(), d.x());
    max_gap = std::max(max_gap, rho[i] - r_last);
  }
  int n_morph = std::max(2, int(std::ceil(max_gap / h_target)));

  std::vector<std::vector<int>> morph(n_morph + 1);
  for (int g = 1; g < n_morph; ++g) {
    morph[g].resize(n_out);
    for (int i = 0; i < n_out; ++i) {
      double r = r_last + (double(g) / n_morph) * (rho[i] - r_last);
      morph[g][i] = int(S.vertices.size());
      S.vertices.emplace_back(c.x() + r * std::cos(alpha[i]),
                              c.y() + r * std::sin(alpha[i]));
    }
  }
  std::vector<int> outer(n_out);
  for (int i = 0; i < n_out; ++i) {
    outer[i] = int(S.vertices.size());
    S.vertices.push_back(poly[i]);
  }
  morph[n_morph] = outer;

  zip_rings(S, ring_ids[n_rings - 1], ring_ang[n_rings - 1], morph[1], alpha);
  for (int g = 1; g < n_morph; ++g) connect_equal_rings(S, morph[g], morph[g + 1]);

  // Opposite cell sides are glued by the lattice translations.
  for (int k = 0; k < n1; ++k)
    S.identifications.push_back(
        {outer[k], outer[k + 1], outer[2 * n1 + n2 - k], outer[2 * n1 + n2 - k - 1]});
  for (int k = 0; k < n2; ++k)
    S.identifications.push_back({outer[n1 + k], outer[n1 + k + 1],
                                 outer[(2 * n1 + 2 * n2 - k) % n_out],
                                 outer[2 * n1 + 2 * n2 - k - 1]});

  // Hole boundary in increasing phi order; phi = -arg(z - c) makes the hole
  // look like a ccw disk boundary through the inversion w = eps / (z - c).
  S.boundary_vertices.resize(n_theta);
  S.boundary_phi.resize(n_theta);
  S.boundary_vertices[0] = 0;
  S.boundary_phi[0] = 0.0;
  for (int j = 1; j < n_theta; ++j) {
    S.boundary_vertices[j] = n_theta - j;
    S.boundary_phi[j] = kTwoPi * j / n_theta;
  }

  S.cycle_a.assign(outer.begin(), outer.begin() + n1 + 1);
  S.cycle_b.push_back(outer[0]);
  for (int k = 2 * n1 + 2 * n2 - 1; k >= 2 * n1 + n2; --k) S.cycle_b.push_back(outer[k]);

  S.finalize();
  return S;
}

SurfaceModel build_disk_mesh(double h_target, int min_boundary_segments) {
  if (!(h_target > 0)) throw GeometryError("h_target must be positive");
  SurfaceModel S;
  S.kind = MeshKind::disk;
  S.h_target = h_target;
  int n_r = std::max(2, int(std::ceil(1.0 / h_target)));
  int n_theta = std::max({64, int(std::ceil(kTwoPi / h_target)), min_boundary_segments});

  S.vertices.emplace_back(0.0, 0.0);
  auto ring_id = [&](int l, int j) { return 1 + (l - 1) * n_theta + j; };
  for (int l = 1; l <= n_r; ++l) {
    double r = double(l) / n_r;
    for (int j = 0; j < n_theta; ++j) {
      double th = kTwoPi * j / n_theta;
      S.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  for (int j = 0; j < n_theta; ++j)
    S.triangles.push_back({0, ring_id(1, j), ring_id(1, (j + 1) % n_theta)});
  for (int l = 1; l < n_r; ++l) {
    std::vector<int> in(n_theta), out(n_theta);
    for (int j = 0; j < n_theta; ++j) {
      in[j] = ring_id(l, j);
      out[j] = ring_id(l + 1, j);
    }
    connect_equal_rings(S, in, out);
  }
  for (int j = 0; j < n_theta; ++j) {
    S.boundary_vertices.push_back(ring_id(n_r, j));
    S.boundary_phi.push_back(kTwoPi * j / n_theta);
  }
  S.finalize();
  return S;
}

SurfaceModel build_closed_torus(Complex tau, double h_target) {
  if (!(tau.imag() > 0)) throw GeometryError("tau must have positive imaginary part");
  if (!(h_target > 0)) throw GeometryError("h_target must be positive");
  SurfaceModel S;
  S.kind = MeshKind::closed_torus;
  S.tau = tau;
  S.h_target = h_target;
  int n1 = std::max(3, int(std::ceil(1.0 / h_target)));
  int n2 = std::max(3, int(std::ceil(std::abs(tau) / h_target)));
  auto id = [&](int i, int j) { return j * (n1 + 1) + i; };
  for (int j = 0; j <= n2; ++j)
    for (int i = 0; i <= n1; ++i) {
      double s = double(i) / n1, t = double(j) / n2;
      S.vertices.emplace_back(s + t * tau.real(), t * tau.imag());
    }
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      S.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      S.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  for (int i = 0; i < n1; ++i)
    S.identifications.push_back({id(i, 0), id(i + 1, 0), id(i, n2), id(i + 1, n2)});
  for (int j = 0; j < n2; ++j)
    S.identifications.push_back({id(0, j), id(0, j + 1), id(n1, j), id(n1, j + 1)});
  for (int i = 0; i <= n1; ++i) S.cycle_a.push_back(id(i, 0));
  for (int j = 0; j <= n2; ++j) S.cycle_b.push_back(id(0, j));
  S.finalize();
  return S;
}

SurfaceModel build_annulus_mesh(double r_in, double r_out, double h_target) {
  if (!(0 < r_in && r_in < r_out)) throw GeometryError("need 0 < r_in < r_out");
  if (!(h_target > 0)) throw GeometryError("h_target must be positive");
  SurfaceModel S;
  S.kind = MeshKind::annulus;
  S.eps = r_in;
  S.outer_radius = r_out;
  S.h_target = h_target;
  double lr = std::log(r_out / r_in);
  int n_r = std::max(4, int(std::ceil(lr * r_out / h_target)));
  int n_theta = std::max(64, int(std::ceil(kTwoPi * r_out / h_target)));
  auto id = [&](int l, int j) { return l * n_theta + j; };
  for (int l = 0; l <= n_r; ++l) {
    double r = r_in * std::exp(lr * double(l) / n_r);
    for (int j = 0; j < n_theta; ++j) {
      double th = kTwoPi * j / n_theta;
      S.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  for (int l = 0; l < n_r; ++l) {
    std::vector<int> in(n_theta), out(n_theta);
    for (int j = 0; j < n_theta; ++j) {
      in[j] = id(l, j);
      out[j] = id(l + 1, j);
    }
    connect_equal_rings(S, in, out);
  }
  for (int j = 0; j < n_theta; ++j) {
    S.inner_boundary_vertices.push_back(id(0, j));
    S.boundary_vertices.push_back(id(n_r, j));
    S.boundary_phi.push_back(kTwoPi * j / n_theta);
  }
  S.finalize();
  return S;
}

void save_mesh(const std::filesystem::path& file, const SurfaceModel& S) {
  std::ostringstream os;
  os << "# dnlab-mesh kind=" << mesh_kind_name(S.kind) << " tau=" << format_complex(S.tau)
     << " eps=" << format_g17(S.eps) << " outer=" << format_g17(S.outer_radius)
     << " h=" << format_g17(S.h_target) << "\n";
  for (const auto& v : S.vertices)
    os << "v " << format_g17(v.x()) << " " << format_g17(v.y()) << "\n";
  for (const auto& t : S.triangles)
    os << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& p : S.identifications)
    os << "p " << p.a << " " << p.b << " " << p.c << " " << p.d << "\n";
  for (size_t j = 0; j < S.boundary_vertices.size(); ++j)
    os << "b " << S.boundary_vertices[j] << " " << format_g17(S.boundary_phi[j]) << "\n";
  for (int v : S.inner_boundary_vertices) os << "B " << v << "\n";
  for (int v : S.cycle_a) os << "c a " << v << "\n";
  for (int v : S.cycle_b) os << "c b " << v << "\n";
  write_text_file(file, os.str());
}

SurfaceModel load_mesh(const std::filesystem::path& file) {
  std::istringstream is(read_text_file(file));
  SurfaceModel S;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dnlab-mesh", 0) != 0)
    throw ParseError("not a mesh file: " + file.string());
  for (const std::string& tok : split(line, ' ')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "kind") S.kind = mesh_kind_from_name(val);
    else if (key == "tau") S.tau = parse_complex(val);
    else if (key == "eps") S.eps = parse_double(val);
    else if (key == "outer") S.outer_radius = parse_double(val);
    else if (key == "h") S.h_target = parse_double(val);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::string xs, ys;
      ls >> xs >> ys;
      S.vertices.emplace_back(parse_double(xs), parse_double(ys));
    } else if (tag == "t") {
      std::array<int, 3> t{};
      ls >> t[0] >> t[1] >> t[2];
      S.triangles.push_back(t);
    } else if (tag == "p") {
      SurfaceModel::EdgePair p{};
      ls >> p.a >> p.b >> p.c >> p.d;
      S.identifications.push_back(p);
    } else if (tag == "b") {
      int v;
      std::string phis;
      ls >> v >> phis;
      S.boundary_vertices.push_back(v);
      S.boundary_phi.push_back(parse_double(phis));
    } else if (tag == "B") {
      int v;
      ls >> v;
      S.inner_boundary_vertices.push_back(v);
    } else if (tag == "c") {
      std::string which;
      int v;
      ls >> which >> v;
      if (which == "a") S.cycle_a.push_back(v);
      else if (which == "b") S.cycle_b.push_back(v);
      else throw ParseError("bad cycle tag in mesh file");
    } else {
      throw ParseError("unknown mesh line: " + line);
    }
    if (ls.fail()) throw ParseError("malformed mesh line: " + line);
  }
  S.finalize();
  return S;
}

}  // namespace dnlab
