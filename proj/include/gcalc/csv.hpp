#pragma once

// CSV persistence. Numbers are written in shortest round-trip form, so a
// write/read cycle is bit-exact.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcalc/baseline.hpp"
#include "gcalc/calculus.hpp"
#include "gcalc/errors.hpp"
#include "gcalc/instafreq.hpp"
#include "gcalc/sigio.hpp"

namespace gcalc {

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_field(std::string_view s, std::size_t line) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("malformed number '" + std::string(s) + "'", line);
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

inline void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace detail

/// Reads `x,re[,im]` with a header row; the x column must be uniform to 1e-9
/// relative to the spacing.
inline SampledSignal read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto header = detail::split_fields(line);
    if (header.size() == 2 && header[0] == "x" && header[1] == "re") columns = 2;
    else if (header.size() == 3 && header[0] == "x" && header[1] == "re" && header[2] == "im") columns = 3;
    else throw IoError("expected header x,re or x,re,im", lineno);
    break;
  }
  if (columns == 0) throw IoError("empty CSV");

  std::vector<double> xs;
  std::vector<cplx> ys;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != columns)
      throw IoError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()), lineno);
    xs.push_back(detail::parse_field(fields[0], lineno));
    ys.emplace_back(detail::parse_field(fields[1], lineno), columns == 3 ? detail::parse_field(fields[2], lineno) : 0.0);
    lines.push_back(lineno);
  }
  if (xs.size() < 2) throw IoError("need at least two samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(dx > 0.0)) throw GridError("x column must be increasing");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double expected = xs.front() + static_cast<double>(k) * dx;
    if (std::abs(xs[k] - expected) > 1e-9 * dx)
      throw GridError("non-uniform grid at line " + std::to_string(lines[k]));
  }
  return SampledSignal(xs.front(), dx, std::move(ys));
}

inline SampledSignal read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

inline void write_csv(const SampledSignal& s, std::ostream& os) {
  os << "x,re,im\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    os << detail::fmt(s.x(k)) << ',' << detail::fmt(s.samples[k].real()) << ',' << detail::fmt(s.samples[k].imag())
       << '\n';
}

inline void write_csv(const InstParamTrace& t, std::ostream& os) {
  os << "x,re,im,err,hole\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const bool hole = t.is_hole(k);
    os << detail::fmt(t.grid[k]) << ',' << detail::fmt(t.values[k].real()) << ',' << detail::fmt(t.values[k].imag())
       << ',' << detail::fmt(hole ? std::nan("") : t.est_error[k]) << ',' << (hole ? 1 : 0) << '\n';
  }
}

inline void write_csv(const FrequencyTrace& t, std::ostream& os) {
  os << "x,omega,hole\n";
  for (std::size_t k = 0; k < t.grid.size(); ++k)
    os << detail::fmt(t.grid[k]) << ',' << detail::fmt(t.omega[k]) << ',' << (t.is_hole(k) ? 1 : 0) << '\n';
}

inline void write_csv(const AmplitudeSpectrum& s, std::ostream& os) {
  os << "omega,F\n";
  for (std::size_t k = 0; k < s.bin_centers.size(); ++k)
    os << detail::fmt(s.bin_centers[k]) << ',' << (s.values[k] ? detail::fmt(*s.values[k]) : "nan") << '\n';
}

inline void write_csv(const Spectrogram& sg, std::ostream& os) {
  os << "x,omega,mag\n";
  for (std::size_t t = 0; t < sg.times.size(); ++t)
    for (std::size_t k = 0; k < sg.freqs.size(); ++k)
      os << detail::fmt(sg.times[t]) << ',' << detail::fmt(sg.freqs[k]) << ',' << detail::fmt(sg.magnitudes[t][k])
         << '\n';
}

inline void write_csv(const Spectrum& s, std::ostream& os) {
  os << "omega,re,im\n";
  for (std::size_t k = 0; k < s.freqs.size(); ++k)
    os << detail::fmt(s.freqs[k]) << ',' << detail::fmt(s.coeffs[k].real()) << ',' << detail::fmt(s.coeffs[k].imag())
       << '\n';
}

template <class T>
void write_csv(const T& value, const std::filesystem::path& path) {
  auto os = detail::open_out(path);
  write_csv(value, static_cast<std::ostream&>(os));
  detail::finish(os, path);
}

}  // namespace gcalc
