#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "sgcgen/error.hpp"

namespace sgcgen {

/// Formats a double with 12 significant digits (the output precision used by
/// every CSV and JSON emitter).
inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// The double whose printed form has 12 significant digits; used to keep JSON
/// numbers at the documented precision.
inline double round12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      std::string field = line.substr(start, i - start);
      while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
      std::size_t lead = field.find_first_not_of(' ');
      out.push_back(lead == std::string::npos ? std::string() : field.substr(lead));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::parse, "cannot parse number '" + std::string(s) + "' in " + what);
  return v;
}

/// Grid specs: either "lo:hi:step" or a comma-separated list of values.
inline std::vector<double> parse_grid_spec(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
      if (i == spec.size() || spec[i] == ':') {
        parts.push_back(spec.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 3)
      throw Error(ErrorCode::parse, "grid spec must be lo:hi:step or a value list: " + spec);
    const double lo = parse_double(parts[0], "grid spec");
    const double hi = parse_double(parts[1], "grid spec");
    const double step = parse_double(parts[2], "grid spec");
    if (step <= 0.0) throw Error(ErrorCode::parse, "grid step must be positive");
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
  } else {
    for (const std::string& f : split_csv_line(spec))
      if (!f.empty()) out.push_back(parse_double(f, "grid spec"));
  }
  if (out.empty()) throw Error(ErrorCode::parse, "empty grid spec: " + spec);
  return out;
}

}  // namespace sgcgen
