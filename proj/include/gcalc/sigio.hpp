#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcalc/errors.hpp"
#include "gcalc/expr.hpp"

namespace gcalc {

/// Uniformly sampled waveform; sample k sits at x0 + k*dx.
struct SampledSignal {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<cplx> samples;

  SampledSignal() = default;
  SampledSignal(double origin, double spacing, std::vector<cplx> values)
      : x0(origin), dx(spacing), samples(std::move(values)) {
    if (!(dx > 0.0)) throw std::invalid_argument("SampledSignal: dx must be > 0");
    if (samples.empty()) throw std::invalid_argument("SampledSignal: no samples");
  }

  std::size_t size() const { return samples.size(); }
  double x(std::size_t k) const { return x0 + static_cast<double>(k) * dx; }

  /// Grid index of `xv` when it lies on the grid (to 1e-9 of a spacing).
  std::optional<std::size_t> index_of(double xv) const {
    const double t = (xv - x0) / dx;
    const double k = std::round(t);
    if (k < 0.0 || k >= static_cast<double>(samples.size()) || std::abs(t - k) > 1e-9) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

  std::vector<double> grid() const {
    std::vector<double> g(samples.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = x(k);
    return g;
  }

  bool operator==(const SampledSignal&) const = default;
};

/// Samples `expr` at x0 + k*dx, k < n.
inline SampledSignal generate(const Expr& expr, double x0, double dx, std::size_t n) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (!(dx > 0.0)) throw std::invalid_argument("generate: dx must be > 0");
  std::vector<cplx> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x0 + static_cast<double>(k) * dx;
    try {
      values[k] = eval(expr, xk);
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " (sample " + std::to_string(k) + ")", xk);
    }
  }
  return SampledSignal(x0, dx, std::move(values));
}

}  // namespace gcalc
