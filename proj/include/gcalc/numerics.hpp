#pragma once

// Numerical limits Delta -> 0: geometric step sequences extrapolated to zero
// with a Neville tableau, plus branch unwrapping for multivalued inverses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcalc/errors.hpp"
#include "gcalc/types.hpp"

namespace gcalc {


struct LimitPolicy {
  double delta0 = 1e-2;
  double ratio = 0.5;
  int max_stages = 8;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// When set, the effective first step is delta0 * max(1, |x|).
  bool scale_with_x = true;

  double first_step(double x) const { return scale_with_x ? delta0 * std::max(1.0, std::abs(x)) : delta0; }

  void validate() const {
    if (!(delta0 > 0.0)) throw std::invalid_argument("LimitPolicy: delta0 must be > 0");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("LimitPolicy: ratio must be in (0,1)");
    if (max_stages < 2) throw std::invalid_argument("LimitPolicy: max_stages must be >= 2");
    if (rtol < 0.0 || atol < 0.0 || (rtol == 0.0 && atol == 0.0))
      throw std::invalid_argument("LimitPolicy: tolerances must be >= 0 and not both zero");
  }
};

struct LimitResult {
  cplx value;
  double est_error = std::numeric_limits<double>::infinity();
  bool converged = false;
  int stages_used = 0;
};

/// Forward (or, for negative delta, backward) stencil x, x+d, ..., x+(count-1)d.
inline std::vector<double> stencil(double x, double delta, std::size_t count) {
  if (count < 2) throw std::invalid_argument("stencil: count must be >= 2");
  if (delta == 0.0) throw std::invalid_argument("stencil: delta must be nonzero");
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k) xs[k] = x + static_cast<double>(k) * delta;
  return xs;
}

/**
 * Limit of g(delta) as delta -> 0 from samples at delta0 * ratio^k.
 *
 * Row k of the tableau holds the extrapolants of degree 0..k built from the
 * nodes ending at stage k. Every entry is scored by its distance to the two
 * lower-order entries it was built from; the best-scoring entry is kept and
 * its score is the error estimate. Stops when the estimate meets
 * max(atol, rtol*|value|), or when the diagonal correction has grown on two
 * consecutive stages (round-off now dominates).
 *
 * A g that throws gcalc::Error is reported as StageError carrying the step.
 */
template <class G>
LimitResult estimate_limit(G&& g, double delta0, const LimitPolicy& policy) {
  using lcplx = std::complex<long double>;
  const int n = policy.max_stages;
  std::vector<std::vector<lcplx>> table(static_cast<std::size_t>(n));
  std::vector<double> deltas(static_cast<std::size_t>(n));

  LimitResult best;
  bool have_best = false;
  long double prev_correction = -1.0L;
  int growth = 0;

  const auto tolerance = [&](cplx v) { return std::max(policy.atol, policy.rtol * std::abs(v)); };

  for (int k = 0; k < n; ++k) {
    const double d = delta0 * std::pow(policy.ratio, k);
    deltas[static_cast<std::size_t>(k)] = d;
    cplx gk;
    try {
      gk = g(d);
    } catch (const Error& e) {
      throw StageError(e.what(), d);
    }
    if (!std::isfinite(gk.real()) || !std::isfinite(gk.imag())) {
      best.converged = false;
      best.stages_used = k + 1;
      if (!have_best) best.value = gk;
      return best;
    }

    auto& row = table[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(k) + 1);
    row[0] = lcplx(gk.real(), gk.imag());
    for (int j = 1; j <= k; ++j) {
      const auto& prev = table[static_cast<std::size_t>(k - 1)];
      // Neville step evaluated at delta = 0.
      const long double factor = static_cast<long double>(deltas[static_cast<std::size_t>(k - j)]) /
                                     static_cast<long double>(d) -
                                 1.0L;
      row[j] = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
      const long double score = std::max(std::abs(row[j] - row[j - 1]), std::abs(row[j] - prev[j - 1]));
      if (!have_best || score <= static_cast<long double>(best.est_error)) {
        best.value = cplx(static_cast<double>(row[j].real()), static_cast<double>(row[j].imag()));
        best.est_error = static_cast<double>(score);
        have_best = true;
      }
    }
    best.stages_used = k + 1;
    if (k == 0) continue;

    if (!std::isfinite(best.est_error)) return best;
    if (best.est_error <= tolerance(best.value)) {
      best.converged = true;
      return best;
    }

    const long double correction =
        std::abs(row[static_cast<std::size_t>(k)] - table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(k - 1)]);
    if (prev_correction >= 0.0L && correction > prev_correction) {
      if (++growth >= 2) return best;
    } else {
      growth = 0;
    }
    prev_correction = correction;
  }
  return best;
}

template <class G>
LimitResult estimate_limit(G&& g, const LimitPolicy& policy) {
  policy.validate();
  return estimate_limit(std::forward<G>(g), policy.delta0, policy);
}

/// Unwraps the real parts of `values` so consecutive entries differ by at
/// most period/2; imaginary parts are left untouched and the first entry is
/// unchanged.
inline std::vector<cplx> unwrap_branch(std::span<const cplx> values, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("unwrap_branch: period must be > 0");
  std::vector<cplx> out(values.begin(), values.end());
  double offset = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double step = values[k].real() - values[k - 1].real();
    offset -= period * std::round(step / period);
    out[k] = cplx(values[k].real() + offset, values[k].imag());
  }
  return out;
}

inline std::vector<double> unwrap_branch(std::span<const double> values, double period) {
  std::vector<cplx> tmp(values.begin(), values.end());
  const auto unwrapped = unwrap_branch(std::span<const cplx>(tmp), period);
  std::vector<double> out(unwrapped.size());
  std::transform(unwrapped.begin(), unwrapped.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

}  // namespace gcalc
