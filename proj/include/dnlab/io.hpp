#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dnlab {

using Complex = std::complex<double>;

// %.17g formatting: shortest form that round-trips IEEE doubles exactly.
std::string format_g17(double x);

// "a+bi" with both parts in %.17g, e.g. "2+0i", "-1.5-0.25i", "1e-05+3.2e-07i".
std::string format_complex(Complex z);

double parse_double(const std::string& s);  // ParseError on trailing junk

// Accepts "a+bi" / "a-bi" (exponents allowed) and plain "a" for real values.
Complex parse_complex(const std::string& s);

// Flat "key=value" text files; keys written in sorted order.
void write_key_values(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& file);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& content);

}  // namespace dnlab
