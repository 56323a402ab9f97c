#include "dnlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "dnlab/errors.hpp"
#include "dnlab/fem.hpp"
#include "dnlab/forms.hpp"
#include "dnlab/io.hpp"
#include "dnlab/mesh.hpp"
#include "dnlab/theta.hpp"

namespace dnlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int require_int(const std::string& key, const std::string& val) {
  double d = parse_double(val);
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw ConfigError("key '" + key + "' needs an integer, got '" + val + "'");
  return int(d);
}

void require_strict_order(const std::vector<double>& v, bool decreasing,
                          const std::string& what) {
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    bool ok = decreasing ? v[i] > v[i + 1] : v[i] < v[i + 1];
    if (!ok)
      throw ConfigError(what + " values must be strictly " +
                        (decreasing ? "decreasing" : "increasing") + ": " +
                        format_g17(v[i]) + " then " + format_g17(v[i + 1]));
  }
}

std::string error_kind(const Error& e) {
  if (dynamic_cast<const SingularDN*>(&e)) return "SingularDN";
  if (dynamic_cast<const NotMeanZero*>(&e)) return "NotMeanZero";
  if (dynamic_cast<const TruncationMismatch*>(&e)) return "TruncationMismatch";
  if (dynamic_cast<const GeometryError*>(&e)) return "GeometryError";
  if (dynamic_cast<const MeshError*>(&e)) return "MeshError";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
  if (dynamic_cast<const DegenerateBasis*>(&e)) return "DegenerateBasis";
  if (dynamic_cast<const MultipleCandidates*>(&e)) return "MultipleCandidates";
  if (dynamic_cast<const LargeResidual*>(&e)) return "LargeResidual";
  if (dynamic_cast<const NormalizationViolated*>(&e))
    return "NormalizationViolated";
  if (dynamic_cast<const DivisionByZero*>(&e)) return "DivisionByZero";
  if (dynamic_cast<const NotSiegel*>(&e)) return "NotSiegel";
  if (dynamic_cast<const SlowConvergence*>(&e)) return "SlowConvergence";
  if (dynamic_cast<const NearDegenerate*>(&e)) return "NearDegenerate";
  if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
  if (dynamic_cast<const NonPositiveLength*>(&e)) return "NonPositiveLength";
  if (dynamic_cast<const NonPositiveModulus*>(&e)) return "NonPositiveModulus";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

std::string short_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Eigen::Matrix2cd siegel_matrix(double gamma, double delta, double beta) {
  Eigen::Matrix2cd B;
  B(0, 0) = Complex(gamma, delta);
  B(0, 1) = Complex(0.0, beta);
  B(1, 0) = Complex(0.0, beta);
  B(1, 1) = Complex(-gamma, delta);
  return B;
}

// Hyperelliptic branch values of the reduced matrix; a vanishing denominator
// or slow theta convergence is a soft outcome recorded next to the row.
std::optional<RosenhainTriple> try_branch(const Eigen::Matrix2cd& B,
                                          std::string& soft_flags) {
  try {
    return rosenhain(B);
  } catch (const NearDegenerate& e) {
    soft_flags += ";theta_degenerate=" + e.constant_name;
  } catch (const SlowConvergence&) {
    soft_flags += ";theta_slow";
  }
  return std::nullopt;
}

DegenerationReport error_row(const std::string& family, double param,
                             const std::string& kind) {
  DegenerationReport r;
  r.eps = family == "torus-hole" ? param : kNan;
  r.dn_distance = kNan;
  r.bcal = Eigen::Matrix2d::Constant(kNan);
  r.gamma = r.delta = r.beta = kNan;
  r.modulus = r.geo_bound = r.collar_L = kNan;
  r.case_label = "n/a";
  r.flags = "error=" + kind;
  return r;
}

DegenerationReport torus_row(const ExperimentConfig& cfg, double eps,
                             const TorusPointData& d) {
  std::string soft;
  std::optional<RosenhainTriple> branch = try_branch(d.siegel_reduced, soft);
  std::string flags = "ok;bcal_dev=" + short_g(d.bcal_deviation);
  if (d.bcal_deviation > cfg.tolerance("bcal_dev")) flags += ";bcal_mismatch";
  if (d.reduced.reduction_incomplete) flags += ";reduction_incomplete";
  flags += soft;
  return build_report(eps, d.spectral.mu, d.dn_distance, d.periods.bcal,
                      d.reduced.gamma, d.reduced.delta, d.reduced.beta, branch,
                      d.modulus, "n/a", flags);
}

// Coupled two-mode fixture pushed through the spectral and period stages.
// The couplings are chosen exactly normalized, so the strict boundary check
// is exercised for free.
DegenerationReport synthetic_row(const ExperimentConfig& cfg, double mu_target,
                                 Eigen::Matrix2cd* siegel_raw) {
  BoundaryOperator dn = make_synthetic_dn(mu_target, cfg.N);
  SpectralData sp = extract_mu(dn);
  if (!sp.mu)
    throw InsufficientData("no eigenvalue inside the spectral band at mu=" +
                           format_g17(mu_target));
  double mu = *sp.mu;
  Complex c_a(1.0, 0.0);
  Complex c_b = Complex(0.0, 1.0) / (2.0 * mu * (1.0 - mu * mu));
  BcalResult bc = bcal_from_boundary(mu, c_a, c_b, /*strict=*/true);
  SiegelData sg = assemble_siegel(mu, bc.bcal);
  *siegel_raw = sg.B;
  NormalizeResult red = normalize_symmetric(sg.gamma, sg.delta, sg.beta);
  std::string soft;
  std::optional<RosenhainTriple> branch =
      try_branch(siegel_matrix(red.gamma, red.delta, red.beta), soft);

  DegenerationReport r;
  r.eps = kNan;
  r.mu = mu;
  r.dn_distance = operator_distance(dn, dn_disk(cfg.N));
  r.bcal = bc.bcal;
  r.gamma = red.gamma;
  r.delta = red.delta;
  r.beta = red.beta;
  r.branch = branch;
  r.modulus = r.geo_bound = r.collar_L = kNan;
  r.case_label = "n/a";
  r.flags = "synthetic" + soft;
  return r;
}

DegenerationReport disk_row(const ExperimentConfig& cfg) {
  std::string key = cache_key("disk-sanity", cfg.tau_lat, 0.0, cfg.h_target, cfg.N);
  std::filesystem::path dir = cfg.out / "cache" / key;
  BoundaryOperator dn;
  if (cfg.cache && std::filesystem::exists(dir / "done")) {
    dn = load_operator(dir / "dn.txt");
  } else {
    SurfaceModel S = build_disk_mesh(cfg.h_target, 40 * cfg.N);
    dn = assemble_dn(S, cfg.N).op;
    if (cfg.cache) {
      std::filesystem::create_directories(dir);
      save_operator(dir / "dn.txt", dn);
      write_text_file(dir / "done", "ok\n");
    }
  }
  double dist = operator_distance(dn, dn_disk(cfg.N));

  // On the disk the harmonic part of any boundary response vanishes, so the
  // residual trace of a fixed probe measures the assembly quality.
  BoundaryFunction f(cfg.N);
  f.c(1) = Complex(1.0, 0.0);
  f.c(-std::min(2, cfg.N)) += Complex(0.5, 0.0);
  BoundaryOperator H = hilbert_from_dn(dn);
  BoundaryFunction HHf = H.apply(H.apply(f));
  BoundaryFunction g(cfg.N);
  g.coeff = HHf.coeff + f.coeff;
  double trace_norm = dn.apply(g).coeff.norm();

  DegenerationReport r;
  r.eps = kNan;
  r.dn_distance = dist;
  r.bcal = Eigen::Matrix2d::Constant(kNan);
  r.gamma = r.delta = r.beta = kNan;
  r.modulus = r.geo_bound = r.collar_L = kNan;
  r.case_label = "n/a";
  r.flags = "disk_sanity;trace_norm=" + short_g(trace_norm);
  return r;
}

}  // namespace

double ExperimentConfig::tolerance(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  if (name == "residual") return 0.05;
  if (name == "bcal_dev") return 0.05;
  throw ConfigError("unknown tolerance '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  auto once = [&seen](const std::string& key) {
    if (!seen.insert(key).second)
      throw ConfigError("duplicate key '" + key + "'");
  };
  for (const std::string& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t pos = line.find('=');
    if (pos == std::string::npos)
      throw ConfigError("expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, pos));
    std::string val = trim(line.substr(pos + 1));
    if (key == "family") {
      once(key);
      cfg.family = val;
    } else if (key == "tau") {
      once(key);
      cfg.tau_lat = parse_complex(val);
    } else if (key == "eps") {
      cfg.eps.push_back(parse_double(val));
    } else if (key == "mu") {
      cfg.mu_list.push_back(parse_double(val));
    } else if (key == "h_target") {
      once(key);
      cfg.h_target = parse_double(val);
    } else if (key == "N") {
      once(key);
      cfg.N = require_int(key, val);
    } else if (key == "out") {
      once(key);
      cfg.out = val;
    } else if (key == "cache") {
      once(key);
      if (val == "on")
        cfg.cache = true;
      else if (val == "off")
        cfg.cache = false;
      else
        throw ConfigError("cache must be on or off, got '" + val + "'");
    } else if (key == "workers") {
      once(key);
      cfg.workers = require_int(key, val);
    } else if (key == "tol_residual") {
      once(key);
      cfg.tolerances["residual"] = parse_double(val);
    } else if (key == "tol_bcal") {
      once(key);
      cfg.tolerances["bcal_dev"] = parse_double(val);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (cfg.family.empty()) throw ConfigError("missing required key 'family'");
  if (cfg.family != "torus-hole" && cfg.family != "disk-sanity" &&
      cfg.family != "synthetic")
    throw ConfigError("unknown family '" + cfg.family + "'");
  if (!(cfg.h_target > 0)) throw ConfigError("h_target must be positive");
  if (cfg.N < 1) throw ConfigError("N must be at least 1");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  for (const auto& [name, value] : cfg.tolerances)
    if (!(value > 0))
      throw ConfigError("tolerance '" + name + "' must be positive");
  if (cfg.family == "torus-hole") {
    if (cfg.eps.empty())
      throw ConfigError("torus-hole needs at least one eps value");
    if (!cfg.mu_list.empty())
      throw ConfigError("mu values only apply to the synthetic family");
    require_strict_order(cfg.eps, /*decreasing=*/true, "eps");
    double limit = 0.85 * torus_d_edge(cfg.tau_lat);
    for (double e : cfg.eps) {
      if (!(e > 0)) throw ConfigError("eps must be positive");
      if (e >= limit)
        throw ConfigError("eps=" + format_g17(e) +
                          " does not embed; the lattice cell caps it at " +
                          format_g17(limit));
    }
  } else if (cfg.family == "synthetic") {
    if (cfg.mu_list.empty())
      throw ConfigError("synthetic needs at least one mu value");
    if (!cfg.eps.empty())
      throw ConfigError("eps values only apply to the torus-hole family");
    require_strict_order(cfg.mu_list, /*decreasing=*/false, "mu");
    for (double m : cfg.mu_list)
      if (!(m > 0.01 && m < 0.999))
        throw ConfigError("mu=" + format_g17(m) +
                          " lies outside the extraction band (0.01, 0.999)");
  } else {
    if (!cfg.eps.empty() || !cfg.mu_list.empty())
      throw ConfigError("disk-sanity takes no eps or mu values");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  return parse_config(read_text_file(file));
}

std::string cache_key(const std::string& family, Complex tau_lat, double eps,
                      double h_target, int N) {
  std::string canon = "family=" + family + "\ntau=" + format_complex(tau_lat) +
                      "\neps=" + format_g17(eps) +
                      "\nh_target=" + format_g17(h_target) +
                      "\nN=" + std::to_string(N) + "\n";
  uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)hash);
  return buf;
}

TorusPointData compute_torus_point(const ExperimentConfig& cfg, double eps) {
  TorusPointData d;
  d.key = cache_key("torus-hole", cfg.tau_lat, eps, cfg.h_target, cfg.N);
  std::filesystem::path dir = cfg.out / "cache" / d.key;
  if (cfg.cache && std::filesystem::exists(dir / "done")) {
    d.from_cache = true;
    d.dn = load_operator(dir / "dn.txt");
    d.trace_a = load_function(dir / "trace_a.txt");
    d.trace_b = load_function(dir / "trace_b.txt");
    auto kv = read_key_values(dir / "bcal_interior.txt");
    d.bcal_interior << parse_double(kv.at("aa")), parse_double(kv.at("ab")),
        parse_double(kv.at("ba")), parse_double(kv.at("bb"));
    d.modulus = parse_double(read_key_values(dir / "modulus.txt").at("modulus"));
  } else {
    SurfaceModel S = build_mesh(cfg.tau_lat, eps, cfg.h_target, 40 * cfg.N);
    DnAssembly da = assemble_dn(S, cfg.N);
    d.dn = da.op;
    auto [va, vb] = harmonic_form_basis(S);
    d.trace_a = form_trace(S, da.modes, va);
    d.trace_b = form_trace(S, da.modes, vb);
    d.bcal_interior = bcal_from_interior(S, va, vb);
    // Doubling the collar (eps, R) across the hole circle gives the annulus
    // eps^2/R < |z| < R in the reflected coordinate.
    double R = 0.95 * torus_d_edge(cfg.tau_lat);
    d.modulus = annulus_modulus(eps * eps / R, R, cfg.h_target);
    if (cfg.cache) {
      std::filesystem::create_directories(dir);
      save_operator(dir / "dn.txt", d.dn);
      save_function(dir / "trace_a.txt", d.trace_a);
      save_function(dir / "trace_b.txt", d.trace_b);
      write_key_values(dir / "bcal_interior.txt",
                       {{"aa", format_g17(d.bcal_interior(0, 0))},
                        {"ab", format_g17(d.bcal_interior(0, 1))},
                        {"ba", format_g17(d.bcal_interior(1, 0))},
                        {"bb", format_g17(d.bcal_interior(1, 1))}});
      write_key_values(dir / "modulus.txt",
                       {{"modulus", format_g17(d.modulus)}});
      write_text_file(dir / "done", "ok\n");
    }
  }

  d.dn_distance = operator_distance(d.dn, dn_disk(cfg.N));
  d.spectral = extract_mu(d.dn);
  if (!d.spectral.mu)
    throw InsufficientData("no eigenvalue inside the spectral band at eps=" +
                           format_g17(eps));
  double mu = *d.spectral.mu;
  double residual_tol = cfg.tolerance("residual");
  ExtractCResult ca = extract_c(d.dn, d.spectral, d.trace_a, residual_tol);
  ExtractCResult cb = extract_c(d.dn, d.spectral, d.trace_b, residual_tol);
  BcalResult bc = bcal_from_boundary(mu, ca.c, cb.c);
  double scale = std::max(bc.bcal.cwiseAbs().maxCoeff(), 1e-300);
  d.bcal_deviation =
      (bc.bcal - d.bcal_interior).cwiseAbs().maxCoeff() / scale;

  SiegelData sg = assemble_siegel(mu, bc.bcal);
  d.siegel_raw = sg.B;
  d.reduced = normalize_symmetric(sg.gamma, sg.delta, sg.beta);
  d.siegel_reduced =
      siegel_matrix(d.reduced.gamma, d.reduced.delta, d.reduced.beta);
  auto [e_a, e_b] = dual_abelian_coeffs(bc.bcal);
  d.periods.mu = mu;
  d.periods.c_a = ca.c;
  d.periods.c_b = cb.c;
  d.periods.bcal = bc.bcal;
  d.periods.gamma = sg.gamma;
  d.periods.delta = sg.delta;
  d.periods.beta = sg.beta;
  d.periods.e_a = e_a;
  d.periods.e_b = e_b;
  return d;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<std::pair<double, double>>& points) {
  auto esc = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '&')
        r += "&amp;";
      else if (c == '<')
        r += "&lt;";
      else if (c == '>')
        r += "&gt;";
      else
        r += c;
    }
    return r;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : points)
    if (std::isfinite(x) && x > 0.0 && std::isfinite(y))
      pts.emplace_back(std::log10(x), y);

  double xmin = -1, xmax = 1, ymin = 0, ymax = 1;
  if (!pts.empty()) {
    xmin = xmax = pts[0].first;
    ymin = ymax = pts[0].second;
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (xmax - xmin < 1e-12) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
      ymin -= 0.5;
      ymax += 0.5;
    } else {
      double pad = 0.05 * (ymax - ymin);
      ymin -= pad;
      ymax += pad;
    }
  }
  const double left = 80, right = 770, top = 50, bottom = 540;
  auto X = [&](double lx) {
    return left + (lx - xmin) / (xmax - xmin) * (right - left);
  };
  auto Y = [&](double y) {
    return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
  };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\""
    << " viewBox=\"0 0 800 600\">\n"
    << "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
    << "  <text x=\"425\" y=\"28\" text-anchor=\"middle\""
    << " font-family=\"sans-serif\" font-size=\"18\">" << esc(title)
    << "</text>\n"
    << "  <line x1=\"80\" y1=\"540\" x2=\"770\" y2=\"540\" stroke=\"black\"/>\n"
    << "  <line x1=\"80\" y1=\"50\" x2=\"80\" y2=\"540\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double lx = xmin + i * (xmax - xmin) / 4.0;
    double px = X(lx);
    o << "  <line x1=\"" << num(px) << "\" y1=\"540\" x2=\"" << num(px)
      << "\" y2=\"546\" stroke=\"black\"/>\n"
      << "  <text x=\"" << num(px) << "\" y=\"562\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"12\">"
      << esc(short_g(std::pow(10.0, lx))) << "</text>\n";
    double yv = ymin + i * (ymax - ymin) / 4.0;
    double py = Y(yv);
    o << "  <line x1=\"74\" y1=\"" << num(py) << "\" x2=\"80\" y2=\"" << num(py)
      << "\" stroke=\"black\"/>\n"
      << "  <text x=\"70\" y=\"" << num(py + 4) << "\" text-anchor=\"end\""
      << " font-family=\"sans-serif\" font-size=\"12\">" << esc(short_g(yv))
      << "</text>\n";
  }
  o << "  <text x=\"425\" y=\"588\" text-anchor=\"middle\""
    << " font-family=\"sans-serif\" font-size=\"14\">" << esc(x_label)
    << "</text>\n"
    << "  <text x=\"22\" y=\"295\" text-anchor=\"middle\""
    << " font-family=\"sans-serif\" font-size=\"14\""
    << " transform=\"rotate(-90 22 295)\">" << esc(y_label) << "</text>\n";
  if (pts.size() >= 2) {
    o << "  <polyline fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"2\""
      << " points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) o << ' ';
      o << num(X(pts[i].first)) << ',' << num(Y(pts[i].second));
    }
    o << "\"/>\n";
  }
  for (const auto& [lx, y] : pts)
    o << "  <circle cx=\"" << num(X(lx)) << "\" cy=\"" << num(Y(y))
      << "\" r=\"4\" fill=\"#1f6feb\"/>\n";
  o << "</svg>\n";
  return o.str();
}

int SweepResult::exit_code() const {
  if (n_points == 0) return 1;
  if (n_failed == 0) return 0;
  return n_failed == n_points ? 1 : 2;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  std::vector<double> params;
  if (cfg.family == "torus-hole")
    params = cfg.eps;
  else if (cfg.family == "synthetic")
    params = cfg.mu_list;
  else if (cfg.family == "disk-sanity")
    params = {0.0};
  else
    throw ConfigError("unknown family '" + cfg.family + "'");

  SweepResult res;
  res.case_label = "n/a";
  res.csv = cfg.out / "report.csv";
  std::filesystem::create_directories(cfg.out);
  if (cfg.cache) std::filesystem::create_directories(cfg.out / "cache");
  if (params.empty()) {
    save_reports(res.csv, {});
    return res;
  }

  struct Outcome {
    DegenerationReport row;
    Eigen::Matrix2cd siegel = Eigen::Matrix2cd::Zero();
    bool ok = false;
    bool has_siegel = false;
  };
  std::vector<Outcome> out(params.size());
  auto job = [&](size_t i) {
    try {
      if (cfg.family == "torus-hole") {
        TorusPointData d = compute_torus_point(cfg, params[i]);
        out[i].row = torus_row(cfg, params[i], d);
        out[i].siegel = d.siegel_raw;
        out[i].has_siegel = true;
      } else if (cfg.family == "synthetic") {
        out[i].row = synthetic_row(cfg, params[i], &out[i].siegel);
        out[i].has_siegel = true;
      } else {
        out[i].row = disk_row(cfg);
      }
      out[i].ok = true;
    } catch (const Error& e) {
      out[i].row = error_row(cfg.family, params[i], error_kind(e));
    } catch (const std::exception&) {
      out[i].row = error_row(cfg.family, params[i], "Unexpected");
    }
  };

  int n_workers = std::clamp(cfg.workers, 1, int(params.size()));
  if (n_workers <= 1) {
    for (size_t i = 0; i < params.size(); ++i) job(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (size_t i; (i = next.fetch_add(1)) < params.size();) job(i);
      });
    for (std::thread& t : pool) t.join();
  }

  // One label for the whole path, from the per-point diagnostics of the
  // assembled (unreduced) matrices in mu order.
  std::vector<std::pair<Eigen::Matrix2cd, double>> path;
  for (const Outcome& o : out)
    if (o.ok && o.has_siegel && o.row.mu) path.emplace_back(o.siegel, *o.row.mu);
  std::string class_note;
  if (path.size() >= 3) {
    try {
      DegenerationClassification cls = classify_degeneration(path);
      res.case_label = cls.label;
      std::ostringstream t;
      t << "label=" << cls.label << "\n";
      for (size_t i = 0; i < cls.points.size(); ++i)
        t << "point" << i << ": b_norm=" << format_g17(cls.points[i].b_norm)
          << " im_inv_norm=" << format_g17(cls.points[i].im_inv_norm)
          << " beta_mag=" << format_g17(cls.points[i].beta_mag) << "\n";
      class_note = t.str();
    } catch (const Error& e) {
      class_note = "label=n/a\nnote=" + error_kind(e) + "\n";
    }
  } else {
    class_note = "label=n/a\nnote=fewer than three usable points\n";
  }
  write_text_file(cfg.out / "classification.txt", class_note);
  if (res.case_label != "n/a")
    for (Outcome& o : out)
      if (o.ok) o.row.case_label = res.case_label;

  res.rows.reserve(out.size());
  for (const Outcome& o : out) res.rows.push_back(o.row);
  // Trend verdicts describe eps sequences; the synthetic family has none.
  if (cfg.family != "synthetic") attach_trend_flags(res.rows);
  save_reports(res.csv, res.rows);

  std::vector<std::pair<double, double>> s_mu, s_dn, s_geo, s_beta;
  for (const DegenerationReport& r : res.rows) {
    if (r.flags.rfind("error", 0) == 0) continue;
    if (!(std::isfinite(r.eps) && r.eps > 0)) continue;
    if (r.mu) s_mu.emplace_back(r.eps, *r.mu);
    s_dn.emplace_back(r.eps, r.dn_distance);
    s_geo.emplace_back(r.eps, r.geo_bound);
    s_beta.emplace_back(r.eps, std::abs(r.beta));
  }
  auto emit = [&](const char* name, const char* title, const char* y_label,
                  const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 2) return;
    std::filesystem::path file = cfg.out / name;
    write_text_file(file, svg_line_plot(title, "hole radius (log scale)",
                                        y_label, series));
    res.plots.push_back(file);
  };
  emit("plot_mu.svg", "interior eigenvalue vs hole radius", "mu", s_mu);
  emit("plot_dn_distance.svg", "boundary-operator distance vs hole radius",
       "distance", s_dn);
  emit("plot_geo_bound.svg", "geodesic length bound vs hole radius", "pi/m",
       s_geo);
  emit("plot_beta.svg", "off-diagonal coupling vs hole radius", "|beta|",
       s_beta);

  res.n_points = int(params.size());
  for (const Outcome& o : out)
    if (!o.ok) ++res.n_failed;
  return res;
}

}  // namespace dnlab
