#pragma once

// Batch front end. `run` parses argv-style arguments, writes CSV (and
// optional SVG) outputs, and reports `status=<ok|fail> max_err=<v>` on the
// error stream. Exit codes: 0 ok, 1 usage, 2 numeric, 3 I/O.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gcalc/baseline.hpp"
#include "gcalc/calculus.hpp"
#include "gcalc/csv.hpp"
#include "gcalc/derivators.hpp"
#include "gcalc/errors.hpp"
#include "gcalc/expr.hpp"
#include "gcalc/instafreq.hpp"
#include "gcalc/sigio.hpp"

namespace gcalc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3 };

struct GridSpec {
  double x0 = 0.0;
  double x1 = 0.0;
  double step = 0.0;

  /// Half-open [x0, x1): points x0 + k*step strictly below x1 (1e-9 step slack).
  std::vector<double> points() const {
    const auto n = static_cast<std::size_t>(std::ceil((x1 - x0) / step - 1e-9));
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = x0 + static_cast<double>(k) * step;
    return g;
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
    throw UsageError("--grid expects x0:x1:step, got '" + text + "'");
  GridSpec g;
  try {
    std::size_t used = 0;
    const auto num = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    g.x0 = num(text.substr(0, a));
    g.x1 = num(text.substr(a + 1, b - a - 1));
    g.step = num(text.substr(b + 1));
  } catch (const std::logic_error&) {
    throw UsageError("--grid expects numbers x0:x1:step, got '" + text + "'");
  }
  if (!(g.x1 > g.x0) || !(g.step > 0.0)) throw UsageError("--grid needs x1 > x0 and step > 0");
  return g;
}

struct RunConfig {
  std::string command;
  std::string demo;
  std::string expr;
  std::string csv;
  std::string family = "linear";
  std::string param;
  std::string grid;
  std::optional<double> delta0;
  std::optional<double> ratio;
  std::optional<int> stages;
  std::string sign_mode = "continuity";
  std::optional<double> bin_width;
  double window_sigma = 1.0;
  std::size_t hop = 1;
  std::string out;
  bool svg = false;
  bool literal_k1 = false;
  std::string expect;
};

namespace detail {

struct Summary {
  bool ok = true;
  double max_err = 0.0;
};

inline LimitPolicy policy_of(const RunConfig& c) {
  LimitPolicy p;
  if (c.delta0) p.delta0 = *c.delta0;
  if (c.ratio) p.ratio = *c.ratio;
  if (c.stages) p.max_stages = *c.stages;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

inline Derivand load_input(const RunConfig& c) {
  if (c.expr.empty() == c.csv.empty()) throw UsageError("give exactly one of --expr or --csv");
  if (!c.expr.empty()) return parse(c.expr);
  try {
    return read_csv(std::filesystem::path(c.csv));
  } catch (const GridError& e) {
    throw IoError(c.csv + ": " + e.what());
  }
}

inline std::vector<double> grid_of(const RunConfig& c, const Derivand& input) {
  if (!c.grid.empty()) return parse_grid(c.grid).points();
  if (const auto* s = std::get_if<SampledSignal>(&input)) return s->grid();
  throw UsageError("--grid is required with --expr");
}

inline std::function<cplx(double)> evaluator(const Expr& e) {
  return [e](double x) { return eval(e, x); };
}

inline std::optional<Expr> expectation(const RunConfig& c) {
  if (c.expect.empty()) return std::nullopt;
  return parse(c.expect);
}

// Writes <out>/<name>, or to `out` when no --out was given.
template <class T>
void emit(const RunConfig& c, const std::string& name, const T& value, std::ostream& out) {
  if (c.out.empty()) {
    write_csv(value, out);
    return;
  }
  write_csv(value, std::filesystem::path(c.out) / name);
}

inline void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  std::string label;
};

struct Box {
  double x0, x1, y0, y1;
};

inline Box bounds(const std::vector<Series>& series) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      b.x0 = std::min(b.x0, s.x[k]);
      b.x1 = std::max(b.x1, s.x[k]);
      b.y0 = std::min(b.y0, s.y[k]);
      b.y1 = std::max(b.y1, s.y[k]);
    }
  if (!std::isfinite(b.x0)) b = {0, 1, 0, 1};
  if (b.x1 == b.x0) b.x1 = b.x0 + 1;
  if (b.y1 == b.y0) b.y1 = b.y0 + 1;
  return b;
}

constexpr double kW = 640, kH = 400, kPad = 40;

inline std::string svg_polylines(const std::vector<Series>& series, const Box& b) {
  std::ostringstream os;
  const auto px = [&](double x) { return kPad + (x - b.x0) / (b.x1 - b.x0) * (kW - 2 * kPad); };
  const auto py = [&](double y) { return kH - kPad - (y - b.y0) / (b.y1 - b.y0) * (kH - 2 * kPad); };
  for (const auto& s : series) {
    std::string pts;
    const auto flush = [&] {
      if (!pts.empty())
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) {
        flush();
        continue;
      }
      pts += gcalc::detail::fmt(px(s.x[k])) + "," + gcalc::detail::fmt(py(s.y[k])) + " ";
    }
    flush();
  }
  double ly = kPad;
  for (const auto& s : series) {
    os << "<text x=\"" << kW - kPad - 150 << "\" y=\"" << ly << "\" fill=\"" << s.color
       << "\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 14;
  }
  return os.str();
}

inline std::string svg_frame(const Box& b, const std::string& body, const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << body << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
     << kH - 2 * kPad << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << kPad << "\" y=\"" << kPad - 10 << "\" font-size=\"13\">" << title << "</text>\n"
     << "<text x=\"" << kPad << "\" y=\"" << kH - 10 << "\" font-size=\"11\">x: " << gcalc::detail::fmt(b.x0) << " .. "
     << gcalc::detail::fmt(b.x1) << ", y: " << gcalc::detail::fmt(b.y0) << " .. " << gcalc::detail::fmt(b.y1)
     << "</text>\n</svg>\n";
  return os.str();
}

inline std::string line_plot(const std::vector<Series>& series, const std::string& title) {
  const Box b = bounds(series);
  return svg_frame(b, svg_polylines(series, b), title);
}

// Spectrogram heatmap with optional curves on the same axes.
inline std::string heatmap_plot(const Spectrogram& sg, const std::vector<Series>& overlay, const std::string& title,
                                double fmax) {
  Box b{sg.times.front(), sg.times.back(), 0.0, fmax};
  if (b.x1 == b.x0) b.x1 = b.x0 + 1;
  double peak = 0.0;
  for (const auto& row : sg.magnitudes)
    for (double m : row) peak = std::max(peak, m);
  std::ostringstream os;
  const double cw = (kW - 2 * kPad) / static_cast<double>(sg.times.size());
  const std::size_t kmax = static_cast<std::size_t>(
      std::upper_bound(sg.freqs.begin(), sg.freqs.end(), fmax) - sg.freqs.begin());
  const double ch = (kH - 2 * kPad) / static_cast<double>(std::max<std::size_t>(kmax, 1));
  for (std::size_t t = 0; t < sg.times.size(); ++t)
    for (std::size_t k = 0; k < kmax; ++k) {
      const double v = peak > 0 ? sg.magnitudes[t][k] / peak : 0.0;
      if (v < 0.02) continue;
      const int shade = static_cast<int>(255.0 * (1.0 - v));
      os << "<rect x=\"" << gcalc::detail::fmt(kPad + static_cast<double>(t) * cw) << "\" y=\""
         << gcalc::detail::fmt(kH - kPad - static_cast<double>(k + 1) * ch) << "\" width=\""
         << gcalc::detail::fmt(cw + 0.5) << "\" height=\"" << gcalc::detail::fmt(ch + 0.5) << "\" fill=\"rgb(" << shade
         << "," << shade << ",255)\"/>\n";
    }
  os << svg_polylines(overlay, b);
  return svg_frame(b, os.str(), title);
}

// ---------------------------------------------------------------------------
// Commands

inline Summary cmd_derive(const RunConfig& c, std::ostream& out) {
  if (c.param.empty()) throw UsageError("--param is required");
  const Family family = Family::from_name(c.family);
  const std::size_t k = family.param_index(c.param);
  const Derivand input = load_input(c);
  const auto grid = grid_of(c, input);
  const GeneralizedDerivativeRequest req{input, family, k, policy_of(c)};
  const InstParamTrace t = derivative_trace(req, grid);
  Summary s;
  s.ok = t.holes.size() < t.size();
  const auto expect = expectation(c);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.is_hole(i)) continue;
    const double e = expect ? std::abs(t.values[i] - eval(*expect, t.grid[i])) : t.est_error[i];
    s.max_err = std::max(s.max_err, e);
  }
  emit(c, "trace_" + family.param_names()[k] + ".csv", t, out);
  if (c.svg && !c.out.empty()) {
    Series re{t.grid, {}, "steelblue", "Re " + family.param_names()[k]};
    for (std::size_t i = 0; i < t.size(); ++i) re.y.push_back(t.values[i].real());
    write_text(std::filesystem::path(c.out) / ("trace_" + family.param_names()[k] + ".svg"),
               line_plot({re}, "D{" + family.param_names()[k] + "} of " + (c.expr.empty() ? c.csv : c.expr)));
  }
  return s;
}

inline Summary cmd_reconstruct(const RunConfig& c, std::ostream& out) {
  const Family family = Family::from_name(c.family);
  const Derivand input = load_input(c);
  const auto grid = grid_of(c, input);
  std::vector<InstParamTrace> traces;
  for (std::size_t k = 0; k < family.arity(); ++k)
    traces.push_back(derivative_trace(GeneralizedDerivativeRequest{input, family, k, policy_of(c)}, grid));
  if (family.kind() == FamilyKind::FourierKernel) gcalc::detail::align_phase(traces[1]);

  const auto original = [&](double x) -> cplx {
    if (const auto* e = std::get_if<Expr>(&input)) return eval(*e, x);
    const auto& sig = std::get<SampledSignal>(input);
    return sig.samples[*sig.index_of(x)];
  };
  InstParamTrace r;
  r.grid = grid;
  r.values.assign(grid.size(), cplx());
  r.est_error.assign(grid.size(), 0.0);
  Summary s;
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      r.values[i] = reconstruct(family, traces, grid[i]);
      r.est_error[i] = std::abs(r.values[i] - original(grid[i]));
      s.max_err = std::max(s.max_err, r.est_error[i]);
      any = true;
    } catch (const GridError&) {
      r.mark_hole(i);
    }
  }
  s.ok = any;
  emit(c, "reconstruct.csv", r, out);
  return s;
}

inline SignMode sign_mode_of(const RunConfig& c) {
  if (c.sign_mode == "continuity") return SignMode::Continuity;
  if (c.sign_mode == "absolute") return SignMode::Absolute;
  throw UsageError("--sign-mode must be continuity or absolute");
}

inline Summary cmd_instafreq(const RunConfig& c, std::ostream& out) {
  const Derivand input = load_input(c);
  const auto grid = grid_of(c, input);
  const LimitPolicy policy = policy_of(c);
  const SignMode mode = sign_mode_of(c);
  if (c.bin_width && c.out.empty()) throw UsageError("--bin-width needs --out for the spectrum file");

  FrequencyTrace ft;
  if (c.family == "fourier") {
    if (c.literal_k1) throw UsageError("--literal-k1 applies to the chirp family only");
    const FourierDerivatives fd = std::visit([&](const auto& d) {
      using T = std::decay_t<decltype(d)>;
      if constexpr (std::is_same_v<T, Expr>) return fourier_derivative(evaluator(d), grid, policy);
      else return fourier_derivative(d, grid, policy);
    }, input);
    ft.grid = fd.omega.grid;
    ft.holes = fd.omega.holes;
    for (const auto& v : fd.omega.values) ft.omega.push_back(mode == SignMode::Absolute ? std::abs(v.real()) : v.real());
  } else if (c.family == "chirp" || c.family == "linear") {
    ChirpDerivatives cd;
    if (const auto* e = std::get_if<Expr>(&input)) {
      cd = chirp_derivatives(evaluator(*e), grid, policy, ChirpOptions{c.literal_k1});
    } else {
      if (c.literal_k1) throw UsageError("--literal-k1 needs --expr input");
      cd = chirp_derivatives(std::get<SampledSignal>(input), grid, policy);
    }
    ft = instantaneous_frequency(cd, mode);
  } else {
    throw UsageError("instafreq supports --family chirp (default) or fourier");
  }

  Summary s;
  s.ok = ft.holes.size() < ft.grid.size();
  const auto expect = expectation(c);
  for (std::size_t i = 0; i < ft.grid.size(); ++i) {
    if (ft.is_hole(i) || !expect) continue;
    s.max_err = std::max(s.max_err, std::abs(ft.omega[i] - eval(*expect, ft.grid[i]).real()));
  }
  emit(c, "omega.csv", ft, out);
  if (c.bin_width) {
    try {
      write_csv(amplitude_spectrum(ft, *c.bin_width), std::filesystem::path(c.out) / "spectrum.csv");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (c.svg && !c.out.empty()) {
    std::vector<Series> series{{ft.grid, ft.omega, "crimson", "omega(x)"}};
    if (expect) {
      Series ref{ft.grid, {}, "gray", c.expect};
      for (double x : ft.grid) ref.y.push_back(eval(*expect, x).real());
      series.insert(series.begin(), ref);
    }
    write_text(std::filesystem::path(c.out) / "omega.svg", line_plot(series, "instantaneous frequency"));
  }
  return s;
}

inline Summary cmd_stft(const RunConfig& c, std::ostream& out) {
  const Derivand input = load_input(c);
  SampledSignal sig;
  if (const auto* e = std::get_if<Expr>(&input)) {
    if (c.grid.empty()) throw UsageError("--grid is required with --expr");
    const GridSpec g = parse_grid(c.grid);
    sig = generate(*e, g.x0, g.step, g.points().size());
  } else {
    sig = std::get<SampledSignal>(input);
  }
  const Spectrogram sg = stft(sig, c.window_sigma, c.hop);
  emit(c, "stft.csv", sg, out);
  if (c.svg && !c.out.empty()) {
    const auto r = ridge(sg);
    write_text(std::filesystem::path(c.out) / "stft.svg",
               heatmap_plot(sg, {{r.trace.grid, r.trace.omega, "black", "ridge"}}, "|F(x, omega)|", sg.freqs.back()));
  }
  return {};
}

inline std::vector<double> closed_grid(double x0, double x1, double step) {
  const auto n = static_cast<std::size_t>(std::llround((x1 - x0) / step));
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = x0 + static_cast<double>(k) * step;
  return g;
}

inline Summary demo_quadratic_chirp(const RunConfig& c, std::ostream& log) {
  const std::string dir = c.out.empty() ? "." : c.out;
  ensure_out_dir(dir);
  const Expr f = parse("sin(2*pi*(x^3/3 + x^2 + x))");
  const auto grid = closed_grid(0.0, 3.0, 0.01);
  const auto exact = [](double x) { return x * x + 2.0 * x + 1.0; };
  const ChirpDerivatives cd = chirp_derivatives(evaluator(f), grid, policy_of(c), ChirpOptions{c.literal_k1});
  const FrequencyTrace ft = instantaneous_frequency(cd, sign_mode_of(c));

  Summary s;
  std::size_t good = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (ft.is_hole(i)) continue;
    const double e = std::abs(ft.omega[i] - exact(grid[i]));
    s.max_err = std::max(s.max_err, e);
    if (e < 1e-3) ++good;
  }
  const double fraction = static_cast<double>(good) / static_cast<double>(grid.size());
  s.ok = fraction >= 0.95;
  log << "omega_qr: " << good << "/" << grid.size() << " points within 1e-3, " << ft.holes.size() << " holes\n";

  const std::filesystem::path out(dir);
  write_csv(ft, out / "omega_qr.csv");
  write_csv(amplitude_spectrum(ft, c.bin_width.value_or(0.1)), out / "spectrum.csv");
  const SampledSignal sig = generate(f, 0.0, 0.01, grid.size());
  const Spectrogram sg = stft(sig, c.window_sigma, c.hop == 1 ? 5 : c.hop);
  write_csv(sg, out / "stft.csv");

  Series reference{grid, {}, "gray", "x^2+2x+1"};
  for (double x : grid) reference.y.push_back(exact(x));
  const auto r = ridge(sg);
  write_text(out / "overlay.svg",
             heatmap_plot(sg,
                          {reference, {ft.grid, ft.omega, "crimson", "omega_qr(x)"},
                           {r.trace.grid, r.trace.omega, "black", "STFT ridge"}},
                          "STFT |F(x, omega)| with omega_qr(x)", 17.0));
  return s;
}

inline Summary demo_wavefunction(const RunConfig& c, std::ostream& log) {
  const std::string dir = c.out.empty() ? "." : c.out;
  ensure_out_dir(dir);
  const Expr psi = parse("2*e^(-i*(x^4/4 + x^2))");
  const auto grid = closed_grid(-2.0, 2.0, 0.01);
  const FourierDerivatives fd = fourier_derivative(evaluator(psi), grid, policy_of(c));
  double ew = 0.0, eb = 0.0, er = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (fd.omega.is_hole(i)) continue;
    const double x = grid[i];
    ew = std::max(ew, std::abs(fd.omega.values[i] - cplx(x * x * x + 2.0 * x)));
    eb = std::max(eb, std::abs(fd.b.values[i] - cplx(std::log(2.0), 0.75 * x * x * x * x + x * x)));
    er = std::max(er, std::abs(wavefunction_reconstruct(fd.omega, fd.b, x) - eval(psi, x)));
  }
  log << "omega_err=" << gcalc::detail::fmt(ew) << " b_err=" << gcalc::detail::fmt(eb)
      << " roundtrip_err=" << gcalc::detail::fmt(er) << "\n";
  const std::filesystem::path out(dir);
  write_csv(fd.omega, out / "wave_omega.csv");
  write_csv(fd.b, out / "wave_b.csv");
  Series w{grid, {}, "crimson", "omega(x)"}, bi{grid, {}, "steelblue", "Im b(x)"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w.y.push_back(fd.omega.values[i].real());
    bi.y.push_back(fd.b.values[i].imag());
  }
  write_text(out / "wavefunction.svg", line_plot({w, bi}, "Fourier derivative of 2e^(-i(x^4/4+x^2))"));
  Summary s;
  s.max_err = std::max({ew, eb, er});
  s.ok = ew < 1e-5 && eb < 1e-5 && er < 1e-8;
  return s;
}

inline Summary cmd_gen(const RunConfig& c, std::ostream& out) {
  if (c.expr.empty()) throw UsageError("--expr is required");
  if (c.grid.empty()) throw UsageError("--grid is required");
  const GridSpec g = parse_grid(c.grid);
  emit(c, "signal.csv", generate(parse(c.expr), g.x0, g.step, g.points().size()), out);
  return {};
}

inline Summary cmd_parse_check(const RunConfig& c, std::ostream& out) {
  if (c.expr.empty()) throw UsageError("--expr is required");
  out << to_text(parse(c.expr)) << '\n';
  return {};
}

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const EvalError*>(&e)) return "EvalError";
  if (dynamic_cast<const SingularStencil*>(&e)) return "SingularStencil";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const StageError*>(&e)) return "StageError";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const GridError*>(&e)) return "GridError";
  if (dynamic_cast<const NotIntegrable*>(&e)) return "NotIntegrable";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const AliasingError*>(&e)) return "AliasingError";
  return "Error";
}

inline std::string format_summary(const Summary& s) {
  return std::string("status=") + (s.ok ? "ok" : "fail") + " max_err=" + gcalc::detail::fmt(s.max_err);
}

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Generalized derivative and integral calculator", "gcalc"};
  app.require_subcommand(1);

  const auto input_opts = [&](CLI::App* sub) {
    sub->add_option("--expr", c.expr, "Expression in x");
    sub->add_option("--csv", c.csv, "Signal CSV (x,re[,im])");
  };
  const auto policy_opts = [&](CLI::App* sub) {
    sub->add_option("--delta0", c.delta0, "First stencil step (scaled by max(1,|x|))");
    sub->add_option("--ratio", c.ratio, "Step reduction ratio in (0,1)");
    sub->add_option("--stages", c.stages, "Maximum extrapolation stages");
  };
  const auto grid_opt = [&](CLI::App* sub) {
    sub->add_option("--grid", c.grid, "Half-open grid x0:x1:step");
  };
  const auto out_opts = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output directory (CSV to stdout when absent)");
    sub->add_flag("--svg", c.svg, "Also write SVG plots (needs --out)");
  };

  auto* derive = app.add_subcommand("derive", "Trace of a generalized derivative over a grid");
  input_opts(derive);
  derive->add_option("--family", c.family, "linear, poly:<n>, exp, sin, cos, tan, chirp, fourier");
  derive->add_option("--param", c.param, "Derivator parameter name");
  grid_opt(derive);
  policy_opts(derive);
  out_opts(derive);
  derive->add_option("--expect", c.expect, "Closed form to report max_err against");

  auto* recon = app.add_subcommand("reconstruct", "Rebuild f from all instantaneous parameter traces");
  input_opts(recon);
  recon->add_option("--family", c.family, "Family id");
  grid_opt(recon);
  policy_opts(recon);
  out_opts(recon);

  auto* inst = app.add_subcommand("instafreq", "Instantaneous frequency trace and amplitude spectrum");
  input_opts(inst);
  std::string inst_family = "chirp";
  inst->add_option("--family", inst_family, "chirp (real waveform) or fourier (complex wave function)");
  grid_opt(inst);
  policy_opts(inst);
  out_opts(inst);
  inst->add_option("--sign-mode", c.sign_mode, "continuity or absolute");
  inst->add_option("--bin-width", c.bin_width, "Amplitude spectrum bin width");
  inst->add_flag("--literal-k1", c.literal_k1, "Use asin(2 f(x+d)) in the omega1 quotient");
  inst->add_option("--expect", c.expect, "Closed form to report max_err against");

  auto* st = app.add_subcommand("stft", "Gabor spectrogram");
  input_opts(st);
  grid_opt(st);
  out_opts(st);
  st->add_option("--window-sigma", c.window_sigma, "Gaussian window standard deviation (units of x)");
  st->add_option("--hop", c.hop, "Frame hop in samples");

  auto* demo = app.add_subcommand("demo", "Worked examples: quadratic-chirp, wavefunction");
  demo->add_option("name", c.demo, "Demo name")->required()->check(CLI::IsMember({"quadratic-chirp", "wavefunction"}));
  demo->add_option("--out", c.out, "Output directory (default: current)");
  demo->add_flag("--svg", c.svg, "Accepted for symmetry; demos always plot");
  policy_opts(demo);
  demo->add_option("--sign-mode", c.sign_mode, "continuity or absolute");
  demo->add_option("--bin-width", c.bin_width, "Amplitude spectrum bin width (default 0.1)");
  demo->add_option("--window-sigma", c.window_sigma, "STFT window standard deviation");
  demo->add_option("--hop", c.hop, "STFT hop in samples (default 5)");
  demo->add_flag("--literal-k1", c.literal_k1, "Use asin(2 f(x+d)) in the omega1 quotient");

  auto* gen = app.add_subcommand("gen", "Sample an expression to CSV");
  gen->add_option("--expr", c.expr, "Expression in x")->required();
  grid_opt(gen);
  gen->add_option("--out", c.out, "Output directory (CSV to stdout when absent)");

  auto* pc = app.add_subcommand("parse-check", "Parse an expression and print its canonical form");
  pc->add_option("--expr", c.expr, "Expression in x")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << detail::format_summary({false, 0.0}) << '\n';
    return kUsage;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  if (c.command == "instafreq") c.family = inst_family;

  detail::Summary summary;
  int code = kOk;
  try {
    if (c.command != "demo" && c.command != "parse-check") detail::ensure_out_dir(c.out);
    if (c.svg && c.out.empty() && c.command != "demo") throw UsageError("--svg needs --out");
    if (c.command == "derive") summary = detail::cmd_derive(c, out);
    else if (c.command == "reconstruct") summary = detail::cmd_reconstruct(c, out);
    else if (c.command == "instafreq") summary = detail::cmd_instafreq(c, out);
    else if (c.command == "stft") summary = detail::cmd_stft(c, out);
    else if (c.command == "demo") summary = c.demo == "wavefunction" ? detail::demo_wavefunction(c, err)
                                                                      : detail::demo_quadratic_chirp(c, err);
    else if (c.command == "gen") summary = detail::cmd_gen(c, out);
    else summary = detail::cmd_parse_check(c, out);
    if (!summary.ok) code = kNumeric;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    summary = {false, 0.0};
    code = kUsage;
  } catch (const ParseError& e) {
    err << "usage error: ParseError at offset " << e.offset() << ": " << e.what() << '\n';
    summary = {false, 0.0};
    code = kUsage;
  } catch (const IoError& e) {
    err << "error: IoError: " << e.what() << '\n';
    summary = {false, 0.0};
    code = kIo;
  } catch (const Error& e) {
    err << "error: " << detail::error_kind(e) << ": " << e.what() << '\n';
    summary = {false, 0.0};
    code = kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    summary = {false, 0.0};
    code = kUsage;
  }
  err << detail::format_summary(summary) << '\n';
  return code;
}

}  // namespace gcalc::cli
