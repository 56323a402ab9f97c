#include "dnlab/collar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dnlab/errors.hpp"

namespace dnlab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_length(double l) {
  if (!(l > 0)) throw NonPositiveLength("geodesic length must be positive, got " +
                                        format_g17(l));
}

}  // namespace

double collar_halfwidth(double l) {
  require_positive_length(l);
  const double s = std::sinh(0.5 * l);
  // asinh(1/s) = ln((1 + sqrt(1+s^2))/s); the subtraction form never forms
  // the huge 1/s.
  if (l <= 1e-3) return std::log(1.0 + std::sqrt(1.0 + s * s)) - std::log(s);
  return std::asinh(1.0 / s);
}

double collar_halfwidth_derivative(double l) {
  require_positive_length(l);
  return -1.0 / (2.0 * std::sinh(0.5 * l));
}

double collar_log_radius(double l) {
  require_positive_length(l);
  return kPi * kPi / l;
}

double collar_log_radius_derivative(double l) {
  require_positive_length(l);
  return -kPi * kPi / (l * l);
}

double puncture_radius_log10(double l) {
  return -collar_log_radius(l) / std::log(10.0);
}

double geodesic_upper_bound(double m) {
  if (!(m > 0))
    throw NonPositiveModulus("annulus modulus must be positive, got " +
                             format_g17(m));
  return kPi / m;
}

DegenerationReport build_report(double eps, std::optional<double> mu,
                                double dn_distance, const Eigen::Matrix2d& bcal,
                                double gamma, double delta, double beta,
                                const std::optional<RosenhainTriple>& branch,
                                double modulus, const std::string& case_label,
                                const std::string& flags) {
  DegenerationReport r;
  r.eps = eps;
  r.mu = mu;
  r.dn_distance = dn_distance;
  r.bcal = bcal;
  r.gamma = gamma;
  r.delta = delta;
  r.beta = beta;
  r.branch = branch;
  r.modulus = modulus;
  r.geo_bound = geodesic_upper_bound(modulus);
  r.collar_L = collar_halfwidth(r.geo_bound);
  r.case_label = case_label;
  r.flags = flags;
  return r;
}

namespace {

bool usable(const DegenerationReport& r) {
  return r.flags.rfind("error", 0) != 0;
}

std::string verdict(bool pass) { return pass ? "pass" : "fail"; }

}  // namespace

void attach_trend_flags(std::vector<DegenerationReport>& rows) {
  std::vector<const DegenerationReport*> use;
  for (const auto& r : rows)
    if (usable(r)) use.push_back(&r);

  std::string token;
  if (use.size() < 2) {
    token = "trends=n/a";
  } else {
    bool mu_up = true, dn_down = true, geo_down = true;
    for (size_t i = 1; i < use.size(); ++i) {
      if (!(use[i]->mu && use[i - 1]->mu && *use[i]->mu > *use[i - 1]->mu))
        mu_up = false;
      if (!(use[i]->dn_distance < use[i - 1]->dn_distance)) dn_down = false;
      if (!(use[i]->geo_bound < use[i - 1]->geo_bound)) geo_down = false;
    }
    token = "trend_mu=" + verdict(mu_up) + ";trend_dn=" + verdict(dn_down) +
            ";trend_geo=" + verdict(geo_down);
  }
  for (auto& r : rows) {
    if (!r.flags.empty()) r.flags += ';';
    r.flags += token;
  }
}

std::string report_csv_header() {
  return "eps,mu,dn_distance,Bcal_aa,Bcal_ab,Bcal_ba,Bcal_bb,gamma,delta,beta,"
         "lam1_re,lam1_im,abs_lam2,abs_lam3,modulus,geo_bound,collar_L,"
         "case_label,flags";
}

std::string report_csv_row(const DegenerationReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream os;
  os << format_g17(r.eps) << ',' << format_g17(r.mu ? *r.mu : nan) << ','
     << format_g17(r.dn_distance) << ',' << format_g17(r.bcal(0, 0)) << ','
     << format_g17(r.bcal(0, 1)) << ',' << format_g17(r.bcal(1, 0)) << ','
     << format_g17(r.bcal(1, 1)) << ',' << format_g17(r.gamma) << ','
     << format_g17(r.delta) << ',' << format_g17(r.beta) << ',';
  if (r.branch)
    os << format_g17(r.branch->lambda1.real()) << ','
       << format_g17(r.branch->lambda1.imag()) << ','
       << format_g17(std::abs(r.branch->lambda2)) << ','
       << format_g17(std::abs(r.branch->lambda3)) << ',';
  else
    os << "nan,nan,nan,nan,";
  os << format_g17(r.modulus) << ',' << format_g17(r.geo_bound) << ','
     << format_g17(r.collar_L) << ',' << r.case_label << ',' << r.flags;
  return os.str();
}

void save_reports(const std::filesystem::path& file,
                  const std::vector<DegenerationReport>& rows) {
  std::ostringstream os;
  os << report_csv_header() << "\n";
  for (const auto& r : rows) os << report_csv_row(r) << "\n";
  write_text_file(file, os.str());
}

std::vector<DegenerationReport> load_reports(const std::filesystem::path& file) {
  std::istringstream is(read_text_file(file));
  std::string line;
  if (!std::getline(is, line) || line != report_csv_header())
    throw ParseError("missing or mismatched report header");

  std::vector<DegenerationReport> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 19)
      throw ParseError("report row has " + std::to_string(f.size()) +
                       " fields, expected 19");
    DegenerationReport r;
    r.eps = parse_double(f[0]);
    const double mu = parse_double(f[1]);
    if (!std::isnan(mu)) r.mu = mu;
    r.dn_distance = parse_double(f[2]);
    r.bcal(0, 0) = parse_double(f[3]);
    r.bcal(0, 1) = parse_double(f[4]);
    r.bcal(1, 0) = parse_double(f[5]);
    r.bcal(1, 1) = parse_double(f[6]);
    r.gamma = parse_double(f[7]);
    r.delta = parse_double(f[8]);
    r.beta = parse_double(f[9]);
    if (!std::isnan(parse_double(f[10]))) {
      RosenhainTriple t;
      t.lambda1 = Complex(parse_double(f[10]), parse_double(f[11]));
      t.lambda2 = Complex(parse_double(f[12]), 0);
      t.lambda3 = Complex(parse_double(f[13]), 0);
      r.branch = t;
    }
    r.modulus = parse_double(f[14]);
    r.geo_bound = parse_double(f[15]);
    r.collar_L = parse_double(f[16]);
    r.case_label = f[17];
    r.flags = f[18];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace dnlab
