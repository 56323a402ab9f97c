#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "dnlab/collar.hpp"
#include "dnlab/errors.hpp"
#include "dnlab/fem.hpp"
#include "dnlab/io.hpp"
#include "dnlab/mesh.hpp"
#include "dnlab/periods.hpp"
#include "dnlab/spectral.hpp"
#include "dnlab/sweep.hpp"
#include "dnlab/theta.hpp"

using namespace dnlab;

namespace {

struct Opts {
  std::string config;
  std::string out;
  std::string in;
  bool no_cache = false;
  int workers = 0;
  double eps = std::nan("");
};

ExperimentConfig resolve_config(const Opts& o) {
  if (o.config.empty()) throw ConfigError("--config <file> is required");
  ExperimentConfig cfg = load_config(o.config);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.no_cache) cfg.cache = false;
  if (o.workers > 0) cfg.workers = o.workers;
  return cfg;
}

double pick_eps(const ExperimentConfig& cfg, const Opts& o) {
  if (!std::isnan(o.eps)) return o.eps;
  if (cfg.eps.empty())
    throw ConfigError("no eps value: give --eps or an eps list in the config");
  return cfg.eps.front();
}

// Builds the boundary operator of the configured family at one point.
BoundaryOperator forward_operator(const ExperimentConfig& cfg, const Opts& o,
                                  std::string* desc) {
  if (cfg.family == "torus-hole") {
    double eps = pick_eps(cfg, o);
    TorusPointData d = compute_torus_point(cfg, eps);
    *desc = "torus-hole eps=" + format_g17(eps);
    return d.dn;
  }
  if (cfg.family == "disk-sanity") {
    SurfaceModel S = build_disk_mesh(cfg.h_target, 40 * cfg.N);
    *desc = "disk-sanity";
    return assemble_dn(S, cfg.N).op;
  }
  if (cfg.family == "synthetic") {
    if (cfg.mu_list.empty()) throw ConfigError("synthetic needs a mu list");
    *desc = "synthetic mu=" + format_g17(cfg.mu_list.front());
    return make_synthetic_dn(cfg.mu_list.front(), cfg.N);
  }
  throw ConfigError("unknown family '" + cfg.family + "'");
}

int cmd_forward(const Opts& o) {
  ExperimentConfig cfg = resolve_config(o);
  std::string desc;
  BoundaryOperator dn = forward_operator(cfg, o, &desc);
  dn.meta["point"] = desc;
  std::filesystem::create_directories(cfg.out);
  std::filesystem::path file = cfg.out / "dn.txt";
  save_operator(file, dn);
  double dist = operator_distance(dn, dn_disk(dn.N));
  std::printf("%s: N=%d, distance to diag|k| = %.6g\n", desc.c_str(), dn.N,
              dist);
  std::printf("operator written to %s\n", file.string().c_str());
  return 0;
}

int cmd_spectrum(const Opts& o) {
  BoundaryOperator dn;
  if (!o.in.empty()) {
    dn = load_operator(o.in);
  } else {
    ExperimentConfig cfg = resolve_config(o);
    std::string desc;
    dn = forward_operator(cfg, o, &desc);
  }
  SpectralData sp = extract_mu(dn);
  std::printf("%zu eigenvalues of iH on mean-zero modes\n",
              sp.eigenvalues.size());
  if (!sp.mu) {
    std::printf("no isolated eigenvalue inside the band (0.01, 0.999)\n");
    return 1;
  }
  std::printf("mu = %s\n", format_g17(*sp.mu).c_str());
  std::printf("pair defect |mu_+ + mu_-| = %.6g\n", sp.pair_defect);
  for (size_t i = 0; i < sp.cluster_gaps.size(); ++i)
    std::printf("cluster gap %zu = %.6g\n", i, sp.cluster_gaps[i]);
  return 0;
}

int cmd_periods(const Opts& o) {
  ExperimentConfig cfg = resolve_config(o);
  if (cfg.family != "torus-hole")
    throw ConfigError("periods needs the torus-hole family");
  double eps = pick_eps(cfg, o);
  TorusPointData d = compute_torus_point(cfg, eps);
  std::filesystem::create_directories(cfg.out);
  save_period_data(cfg.out / "periods.txt", d.periods);
  save_siegel_matrix(cfg.out / "siegel.txt", d.siegel_raw);
  save_siegel_matrix(cfg.out / "siegel_reduced.txt", d.siegel_reduced);
  std::printf("eps=%s mu=%s\n", format_g17(eps).c_str(),
              format_g17(d.periods.mu).c_str());
  std::printf("c_a=%s c_b=%s\n", format_complex(d.periods.c_a).c_str(),
              format_complex(d.periods.c_b).c_str());
  std::printf("couplings (rows a,b): [%.6g %.6g; %.6g %.6g], route gap %.3g\n",
              d.periods.bcal(0, 0), d.periods.bcal(0, 1), d.periods.bcal(1, 0),
              d.periods.bcal(1, 1), d.bcal_deviation);
  std::printf("gamma=%s delta=%s beta=%s\n", format_g17(d.reduced.gamma).c_str(),
              format_g17(d.reduced.delta).c_str(),
              format_g17(d.reduced.beta).c_str());
  std::string moves;
  for (const std::string& m : d.reduced.moves)
    moves += (moves.empty() ? "" : ", ") + m;
  std::printf("reduction moves: %s\n", moves.empty() ? "none" : moves.c_str());
  std::printf("period data written under %s\n", cfg.out.string().c_str());
  return 0;
}

int cmd_theta(const Opts& o) {
  std::filesystem::path in;
  std::filesystem::path out_dir;
  if (!o.in.empty()) {
    in = o.in;
    out_dir = o.out.empty() ? in.parent_path() : std::filesystem::path(o.out);
  } else {
    ExperimentConfig cfg = resolve_config(o);
    in = cfg.out / "siegel_reduced.txt";
    out_dir = cfg.out;
  }
  Eigen::Matrix2cd B = load_siegel_matrix(in);
  std::string csv = theta_csv_header() + "\n";
  for (const Characteristic& chi : even_characteristics()) {
    ThetaConstant t = theta_constant(B, chi);
    csv += theta_csv_row(t) + "\n";
    std::printf("e%d%d%d%d = %s  (R=%d%s)\n", chi[0], chi[1], chi[2], chi[3],
                format_complex(t.value).c_str(), t.R,
                t.vanishing ? ", vanishing" : "");
  }
  std::filesystem::create_directories(out_dir);
  std::filesystem::path file = out_dir / "theta.csv";
  write_text_file(file, csv);
  std::printf("theta constants written to %s\n", file.string().c_str());
  try {
    RosenhainTriple r = rosenhain(B);
    std::printf("branch values: lambda1=%s lambda2=%s lambda3=%s\n",
                format_complex(r.lambda1).c_str(),
                format_complex(r.lambda2).c_str(),
                format_complex(r.lambda3).c_str());
  } catch (const NearDegenerate& e) {
    std::printf("branch values degenerate: %s vanishes\n",
                e.constant_name.c_str());
  }
  return 0;
}

int cmd_sweep(const Opts& o) {
  ExperimentConfig cfg = resolve_config(o);
  SweepResult res = run_sweep(cfg);
  for (const DegenerationReport& r : res.rows) {
    if (r.mu)
      std::printf("eps=%-8.4g mu=%-10.6g dn=%-10.4g geo=%-10.4g %s\n", r.eps,
                  *r.mu, r.dn_distance, r.geo_bound, r.flags.c_str());
    else
      std::printf("eps=%-8.4g mu=absent    dn=%-10.4g geo=%-10.4g %s\n", r.eps,
                  r.dn_distance, r.geo_bound, r.flags.c_str());
  }
  std::printf("classification: %s\n", res.case_label.c_str());
  std::printf("%d/%d points succeeded; report at %s\n",
              res.n_points - res.n_failed, res.n_points,
              res.csv.string().c_str());
  for (const std::filesystem::path& p : res.plots)
    std::printf("plot: %s\n", p.string().c_str());
  return res.exit_code();
}

int cmd_report(const Opts& o) {
  std::filesystem::path file;
  if (!o.in.empty())
    file = o.in;
  else
    file = resolve_config(o).out / "report.csv";
  std::vector<DegenerationReport> rows = load_reports(file);
  std::printf("%s\n", report_csv_header().c_str());
  int failed = 0;
  for (const DegenerationReport& r : rows) {
    std::printf("%s\n", report_csv_row(r).c_str());
    if (r.flags.rfind("error", 0) == 0) ++failed;
  }
  std::printf("%zu rows, %d flagged as errors\n", rows.size(), failed);
  if (rows.empty() || failed == int(rows.size())) return rows.empty() ? 0 : 1;
  return failed > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-to-Neumann degeneration laboratory"};
  app.require_subcommand(1);
  Opts o;
  int rc = 0;

  auto add_common = [&](CLI::App* cmd, bool with_eps, bool with_in) {
    cmd->add_option("--config", o.config, "experiment config file");
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_flag("--no-cache", o.no_cache, "ignore and do not write the cache");
    cmd->add_option("--workers", o.workers, "concurrent sweep points");
    if (with_eps)
      cmd->add_option("--eps", o.eps, "hole radius (default: first eps)");
    if (with_in) cmd->add_option("--in", o.in, "input file");
    return cmd;
  };

  add_common(app.add_subcommand("forward",
                                "assemble the boundary operator of one point"),
             true, false)
      ->callback([&] { rc = cmd_forward(o); });
  add_common(app.add_subcommand(
                 "spectrum", "interior eigenvalue of the boundary operator"),
             true, true)
      ->callback([&] { rc = cmd_spectrum(o); });
  add_common(app.add_subcommand(
                 "periods", "couplings, abelian coefficients, Siegel matrix"),
             true, false)
      ->callback([&] { rc = cmd_periods(o); });
  add_common(app.add_subcommand(
                 "theta", "even theta constants and branch values"),
             false, true)
      ->callback([&] { rc = cmd_theta(o); });
  add_common(app.add_subcommand("sweep", "run the configured family sweep"),
             false, false)
      ->callback([&] { rc = cmd_sweep(o); });
  add_common(app.add_subcommand("report", "print a saved sweep report"), false,
             true)
      ->callback([&] { rc = cmd_report(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
