#include <doctest.h>

#include <cctype>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "dnlab/collar.hpp"
#include "dnlab/errors.hpp"
#include "dnlab/fem.hpp"
#include "dnlab/io.hpp"
#include "dnlab/sweep.hpp"

using namespace dnlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

int count_occ(const std::string& s, const std::string& pat) {
  int c = 0;
  for (size_t p = 0; (p = s.find(pat, p)) != std::string::npos; p += pat.size())
    ++c;
  return c;
}

// Tag-balance well-formedness: one root, every element closed, prolog intact.
bool xml_well_formed(const std::string& s) {
  std::vector<std::string> stack;
  bool seen_root = false;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 2, "<?") == 0) {
      size_t e = s.find("?>", i);
      if (e == std::string::npos) return false;
      i = e + 2;
      continue;
    }
    size_t e = s.find('>', i);
    if (e == std::string::npos) return false;
    bool closing = s[i + 1] == '/';
    bool self_closing = s[e - 1] == '/';
    size_t beg = i + (closing ? 2 : 1);
    size_t end = beg;
    while (end < e && !std::isspace((unsigned char)s[end]) && s[end] != '/')
      ++end;
    std::string name = s.substr(beg, end - beg);
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      if (stack.empty() && seen_root) return false;
      seen_root = true;
      if (!self_closing) stack.push_back(name);
    }
    i = e + 1;
  }
  return stack.empty() && seen_root;
}

ExperimentConfig synthetic_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.family = "synthetic";
  cfg.mu_list = {0.5, 0.9, 0.99};
  cfg.N = 16;
  cfg.out = out;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("sweep");

TEST_CASE("cache key is frozen and input-sensitive") {
  // FNV-1a over the canonical fragment, frozen against an independent
  // implementation of the same hash.
  std::string key = cache_key("torus-hole", Complex(0.0, 1.0), 0.2, 0.08, 16);
  CHECK(key == "872e290432cbb2c7");
  CHECK(cache_key("torus-hole", Complex(0.0, 1.0), 0.2 + 1e-12, 0.08, 16) ==
        "c0173ce5e0b8041b");

  CHECK(key == cache_key("torus-hole", Complex(0.0, 1.0), 0.2, 0.08, 16));
  CHECK(key != cache_key("disk-sanity", Complex(0.0, 1.0), 0.2, 0.08, 16));
  CHECK(key != cache_key("torus-hole", Complex(0.1, 1.0), 0.2, 0.08, 16));
  CHECK(key != cache_key("torus-hole", Complex(0.0, 1.0), 0.2, 0.081, 16));
  CHECK(key != cache_key("torus-hole", Complex(0.0, 1.0), 0.2, 0.08, 15));
}

TEST_CASE("config parsing, defaults and canonicalization") {
  std::string text =
      "# sweep description\n"
      "family=torus-hole\n"
      "tau=0+1i\n"
      "\n"
      "eps=0.3\n"
      "eps=0.2\n"
      "eps=0.1\n"
      "h_target=0.08\n"
      "N=16\n"
      "out=results\n"
      "cache=off\n"
      "workers=3\n"
      "tol_residual=0.01\n";
  ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.family == "torus-hole");
  CHECK(cfg.tau_lat == Complex(0.0, 1.0));
  CHECK(cfg.eps == std::vector<double>{0.3, 0.2, 0.1});
  CHECK(cfg.h_target == 0.08);
  CHECK(cfg.N == 16);
  CHECK(cfg.out == fs::path("results"));
  CHECK(!cfg.cache);
  CHECK(cfg.workers == 3);
  CHECK(cfg.tolerance("residual") == 0.01);
  CHECK(cfg.tolerance("bcal_dev") == 0.05);  // built-in default
  CHECK_THROWS_AS((void)cfg.tolerance("unknown"), ConfigError);

  // Defaults when keys are absent.
  ExperimentConfig d = parse_config("family=disk-sanity\n");
  CHECK(d.tau_lat == Complex(0.0, 1.0));
  CHECK(d.h_target == 0.08);
  CHECK(d.N == 16);
  CHECK(d.cache);
  CHECK(d.workers == 1);

  // Line order never reaches the cache key: it hashes parsed fields.
  std::string reordered =
      "N=16\nh_target=0.08\neps=0.3\neps=0.2\neps=0.1\ntau=0+1i\n"
      "family=torus-hole\n";
  ExperimentConfig cfg2 = parse_config(reordered);
  CHECK(cache_key(cfg.family, cfg.tau_lat, cfg.eps[1], cfg.h_target, cfg.N) ==
        "872e290432cbb2c7");
  CHECK(cache_key(cfg2.family, cfg2.tau_lat, cfg2.eps[1], cfg2.h_target,
                  cfg2.N) == "872e290432cbb2c7");

  fs::path file = fs::temp_directory_path() / "dnlab_sweep_cfg.txt";
  write_text_file(file, text);
  ExperimentConfig loaded = load_config(file);
  CHECK(loaded.eps == cfg.eps);
  fs::remove(file);
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);  // missing family
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nradius=1\n"),
                  ConfigError);  // unknown key
  CHECK_THROWS_AS(parse_config("family=sphere\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\n"), ConfigError);  // no eps
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.1\neps=0.2\n"),
                  ConfigError);  // increasing
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\neps=0.2\n"),
                  ConfigError);  // not strict
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.6\n"),
                  ConfigError);  // hole does not embed at tau=i
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nN=2\nN=4\n"),
                  ConfigError);  // duplicate scalar key
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\ncache=maybe\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nN=2.5\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nworkers=0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nh_target=0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\ntol_bcal=0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\njust words\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family=synthetic\n"), ConfigError);  // no mu
  CHECK_THROWS_AS(parse_config("family=synthetic\nmu=0.9\nmu=0.5\n"),
                  ConfigError);  // decreasing
  CHECK_THROWS_AS(parse_config("family=synthetic\nmu=0.9995\n"),
                  ConfigError);  // outside extraction band
  CHECK_THROWS_AS(parse_config("family=synthetic\nmu=0.5\neps=0.2\n"),
                  ConfigError);  // eps is torus-only
  CHECK_THROWS_AS(parse_config("family=disk-sanity\neps=0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("family=torus-hole\neps=0.2\nmu=0.5\n"),
                  ConfigError);  // mu is synthetic-only
}

TEST_CASE("svg plots are well-formed xml") {
  std::vector<std::pair<double, double>> pts = {
      {0.3, 0.52}, {0.2, 0.66}, {0.1, 0.87}, {0.05, 0.97}};
  std::string svg = svg_line_plot("rising trend", "x", "y", pts);
  CHECK(svg.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>", 0) == 0);
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(xml_well_formed(svg));
  CHECK(count_occ(svg, "<circle") == 4);
  CHECK(count_occ(svg, "<polyline") == 1);

  // Labels are escaped, never injected raw.
  std::string esc = svg_line_plot("a<b&c", "x", "y", pts);
  CHECK(esc.find("a&lt;b&amp;c") != std::string::npos);
  CHECK(esc.find("a<b") == std::string::npos);
  CHECK(xml_well_formed(esc));

  // Log axis drops non-positive and non-finite abscissae.
  std::vector<std::pair<double, double>> mixed = {
      {-1.0, 2.0},
      {std::nan(""), 3.0},
      {0.1, 1.0},
      {0.2, 2.0}};
  std::string partial = svg_line_plot("t", "x", "y", mixed);
  CHECK(count_occ(partial, "<circle") == 2);
  CHECK(xml_well_formed(partial));

  // Degenerate input still renders a valid empty frame.
  std::string empty = svg_line_plot("t", "x", "y", {});
  CHECK(xml_well_formed(empty));
  CHECK(count_occ(empty, "<polyline") == 0);
}

TEST_CASE("synthetic sweep labels a trivial pinch") {
  fs::path out = fresh_dir("dnlab_sweep_synth");
  ExperimentConfig cfg = synthetic_config(out);
  SweepResult res = run_sweep(cfg);

  CHECK(res.n_points == 3);
  CHECK(res.n_failed == 0);
  CHECK(res.exit_code() == 0);
  CHECK(res.plots.empty());  // no eps axis to plot against
  REQUIRE(res.rows.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    const DegenerationReport& r = res.rows[i];
    REQUIRE(r.mu.has_value());
    CHECK(std::abs(*r.mu - cfg.mu_list[i]) < 1e-10);
    CHECK(std::isnan(r.eps));
    CHECK(std::isnan(r.modulus));
    // The coupled fixture is exactly normalized, so det = 1/mu^2 to rounding.
    double det = r.bcal.determinant();
    CHECK(std::abs(det * cfg.mu_list[i] * cfg.mu_list[i] - 1.0) < 1e-8);
    CHECK(r.gamma == 0.0);
    CHECK(r.delta > r.beta);
    CHECK(r.beta > 0.0);  // reduction flips the negative coupling
  }
  // At mu = 0.99 the period matrix is nearly pinched and the first branch
  // denominator collapses; the row is flagged instead of failed.
  CHECK(res.rows[0].flags == "synthetic");
  CHECK(res.rows[1].flags == "synthetic");
  CHECK(res.rows[2].flags == "synthetic;theta_degenerate=e0011");
  REQUIRE(res.rows[0].branch.has_value());
  REQUIRE(res.rows[1].branch.has_value());
  CHECK(!res.rows[2].branch.has_value());
  // Bounded matrices with decaying coupling: the homologically trivial case.
  CHECK(res.case_label == "case-i (homologically trivial pinch)");
  for (const DegenerationReport& r : res.rows)
    CHECK(r.case_label == "case-i (homologically trivial pinch)");
  std::string note = read_text_file(out / "classification.txt");
  CHECK(note.rfind("label=case-i", 0) == 0);
  CHECK(count_occ(note, "b_norm=") == 3);

  // Same config, same bytes.
  std::string csv1 = read_text_file(res.csv);
  SweepResult res2 = run_sweep(cfg);
  CHECK(read_text_file(res2.csv) == csv1);
  std::vector<DegenerationReport> loaded = load_reports(res.csv);
  REQUIRE(loaded.size() == 3);
  CHECK(*loaded[2].mu == *res.rows[2].mu);
  fs::remove_all(out);
}

TEST_CASE("disk sweep caches and reruns without solves") {
  fs::path out = fresh_dir("dnlab_sweep_disk");
  ExperimentConfig cfg;
  cfg.family = "disk-sanity";
  cfg.h_target = 0.12;
  cfg.N = 4;
  cfg.out = out;

  reset_fem_solve_count();
  SweepResult r1 = run_sweep(cfg);
  CHECK(fem_solve_count() > 0);
  CHECK(r1.exit_code() == 0);
  REQUIRE(r1.rows.size() == 1);
  CHECK(!r1.rows[0].mu.has_value());
  CHECK(r1.rows[0].flags.rfind("disk_sanity;trace_norm=", 0) == 0);
  CHECK(r1.rows[0].flags.find(";trends=n/a") != std::string::npos);
  CHECK(r1.rows[0].dn_distance < 0.2);
  CHECK(r1.rows[0].case_label == "n/a");
  std::string csv1 = read_text_file(r1.csv);

  // Complete cache entry: the rerun touches no FEM solver and the report is
  // reproduced byte for byte.
  reset_fem_solve_count();
  SweepResult r2 = run_sweep(cfg);
  CHECK(fem_solve_count() == 0);
  CHECK(read_text_file(r2.csv) == csv1);

  // Cache off recomputes but lands on the same bytes.
  cfg.cache = false;
  reset_fem_solve_count();
  SweepResult r3 = run_sweep(cfg);
  CHECK(fem_solve_count() > 0);
  CHECK(read_text_file(r3.csv) == csv1);
  fs::remove_all(out);
}

TEST_CASE("torus sweep runs end to end") {
  fs::path out = fresh_dir("dnlab_sweep_torus");
  ExperimentConfig cfg;
  cfg.family = "torus-hole";
  cfg.tau_lat = Complex(0.0, 1.0);
  cfg.eps = {0.28, 0.2};
  cfg.h_target = 0.16;
  cfg.N = 6;
  cfg.out = out;
  cfg.workers = 2;

  reset_fem_solve_count();
  SweepResult res = run_sweep(cfg);
  CHECK(fem_solve_count() > 0);
  CHECK(res.n_points == 2);
  CHECK(res.n_failed == 0);
  CHECK(res.exit_code() == 0);
  REQUIRE(res.rows.size() == 2);

  const DegenerationReport& r0 = res.rows[0];
  const DegenerationReport& r1 = res.rows[1];
  CHECK(r0.eps == 0.28);
  CHECK(r1.eps == 0.2);
  REQUIRE(r0.mu.has_value());
  REQUIRE(r1.mu.has_value());
  CHECK(*r0.mu > 0.01);
  CHECK(*r1.mu < 0.999);
  CHECK(*r0.mu < *r1.mu);                  // shrinking hole pushes mu up
  CHECK(r0.dn_distance > r1.dn_distance);  // and the operator toward |d/dphi|
  CHECK(r0.geo_bound > r1.geo_bound);
  CHECK(r0.modulus < r1.modulus);
  CHECK(r0.flags.rfind("ok;bcal_dev=", 0) == 0);
  CHECK(r0.flags.find("trend_mu=pass") != std::string::npos);
  CHECK(r0.flags.find("trend_dn=pass") != std::string::npos);
  CHECK(r0.flags.find("trend_geo=pass") != std::string::npos);
  CHECK(r0.flags.find("bcal_mismatch") == std::string::npos);
  // Two points cannot be classified; the label stays explicit.
  CHECK(r0.case_label == "n/a");

  // The two period routes see the same coupling scale-wise and the
  // determinant identity holds to discretization accuracy.
  for (const DegenerationReport& r : res.rows) {
    double mu = *r.mu;
    CHECK(std::abs(r.bcal.determinant() * mu * mu - 1.0) < 0.25);
    CHECK(r.gamma >= 0.0);
    CHECK(r.gamma <= 0.5);
    CHECK(r.delta > 0.0);
    CHECK(r.collar_L == doctest::Approx(collar_halfwidth(r.geo_bound))
                            .epsilon(1e-12));
  }

  REQUIRE(res.plots.size() == 4);
  for (const fs::path& p : res.plots) {
    std::string svg = read_text_file(p);
    CHECK(xml_well_formed(svg));
    CHECK(count_occ(svg, "<circle") == 2);
  }

  // Cached rerun: no solves, identical bytes.
  std::string csv1 = read_text_file(res.csv);
  reset_fem_solve_count();
  SweepResult res2 = run_sweep(cfg);
  CHECK(fem_solve_count() == 0);
  CHECK(read_text_file(res2.csv) == csv1);

  // The cached point reloads into the same downstream numbers.
  TorusPointData d = compute_torus_point(cfg, 0.2);
  CHECK(d.from_cache);
  CHECK(d.key == cache_key("torus-hole", cfg.tau_lat, 0.2, 0.16, 6));
  CHECK(fs::exists(out / "cache" / d.key / "dn.txt"));
  CHECK(fs::exists(out / "cache" / d.key / "done"));
  CHECK(*d.spectral.mu == *r1.mu);
  CHECK(d.reduced.gamma == r1.gamma);
  CHECK(d.modulus == r1.modulus);
  fs::remove_all(out);
}

TEST_SUITE_END();
