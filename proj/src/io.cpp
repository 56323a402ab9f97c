#include "dnlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dnlab/errors.hpp"

namespace dnlab {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("empty numeric field");
  size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ParseError("bad numeric field: '" + s + "'");
  }
  if (pos != t.size()) throw ParseError("trailing junk in numeric field: '" + s + "'");
  return v;
}

Complex parse_complex(const std::string& s) {
  std::string t = trim(s);
  if (t.empty()) throw ParseError("empty complex field");
  if (t.back() != 'i') return Complex(parse_double(t), 0.0);
  t.pop_back();
  // Split before the sign of the imaginary part: the last '+'/'-' that is not
  // an exponent sign and not the leading sign of the real part.
  size_t split = std::string::npos;
  for (size_t i = t.size(); i-- > 1;) {
    const char c = t[i];
    if ((c == '+' || c == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) throw ParseError("bad complex field: '" + s + "'");
  const double re = parse_double(t.substr(0, split));
  std::string imag_part = t.substr(split);
  if (imag_part == "+" || imag_part == "-") imag_part += "1";
  return Complex(re, parse_double(imag_part));
}

void write_key_values(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
  write_text_file(file, out.str());
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& file) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_text_file(file));
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value, got: '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file: " + file.string());
  out << content;
  if (!out.good()) throw ParseError("write failed: " + file.string());
}

}  // namespace dnlab
