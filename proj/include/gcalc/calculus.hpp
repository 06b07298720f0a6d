#pragma once

// Generalized derivative D{p_k} df/dx, the generalized integral
// (reconstruction from instantaneous parameters), monomial closed forms and
// vanishing-term reconstruction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gcalc/derivators.hpp"
#include "gcalc/errors.hpp"
#include "gcalc/expr.hpp"
#include "gcalc/numerics.hpp"
#include "gcalc/rational.hpp"
#include "gcalc/sigio.hpp"

namespace gcalc {

// ---------------------------------------------------------------------------
// Monomial tables

template <class T>
struct Monomial {
  T coeff;
  T exponent;
  bool operator==(const Monomial&) const = default;
};

/// D{a_n} of c x^m under the degree-n polynomial derivator:
/// c/n! * prod_{i<n} (m - i) * x^(m-n).
template <class T>
Monomial<T> monomial_derivative(T c, T m, int n) {
  if (n < 1) throw std::invalid_argument("monomial_derivative: n must be >= 1");
  T coeff = c;
  for (int i = 0; i < n; ++i) {
    coeff = coeff * (m - T(i));
    coeff = coeff / T(i + 1);
  }
  return {coeff, m - T(n)};
}

/// Inverse of monomial_derivative within the degree-n polynomial family.
template <class T>
Monomial<T> monomial_antiderivative(T c, T m, int n) {
  if (n < 1) throw std::invalid_argument("monomial_antiderivative: n must be >= 1");
  if (n == 1) {
    if (m + T(1) == T(0)) throw NotIntegrable("not integrable in this family: m = -1 with n = 1");
    return {c / (m + T(1)), m + T(1)};
  }
  if (m + T(n) == T(0)) throw NotIntegrable("not integrable in this family: m + n = 0");
  T denom = m + T(n);
  for (int i = 1; i < n; ++i) {
    if (m + T(i) == T(0))
      throw NotIntegrable("not integrable in this family: m + " + std::to_string(i) + " = 0");
    denom = denom * ((m + T(i)) / T(i + 1));
  }
  return {c / denom, m + T(n)};
}

// ---------------------------------------------------------------------------
// Generalized derivative

using Derivand = std::variant<Expr, SampledSignal>;

struct GeneralizedDerivativeRequest {
  Derivand derivand;
  Family family;
  std::size_t param_index = 0;
  /// Unset: LimitPolicy{} (first step scaled by max(1, |x|)).
  std::optional<LimitPolicy> policy;
};

/// Limit of the k-th parameter quotient of `family` for a callable derivand.
template <class F>
LimitResult generalized_derivative(F&& f, const Family& family, std::size_t param_index, double x,
                                   const LimitPolicy& policy = {}) {
  if (param_index >= family.arity()) throw std::invalid_argument("parameter index out of range");
  policy.validate();
  const double delta0 = policy.first_step(x);
  return estimate_limit([&](double d) { return param_quotient(family, param_index, f, x, d); }, delta0, policy);
}

/// Sampled derivand: steps are j*dx for j = 2^(m-1), ..., 2, 1 so every
/// stencil point is a sample; backward stencils are used near the right end.
inline LimitResult generalized_derivative(const SampledSignal& sig, const Family& family, std::size_t param_index,
                                          double x, const LimitPolicy& policy = {}) {
  if (param_index >= family.arity()) throw std::invalid_argument("parameter index out of range");
  const auto idx = sig.index_of(x);
  if (!idx) throw GridError("x=" + std::to_string(x) + " is not a sample point");
  const std::size_t span = family.arity() - 1;
  const std::size_t forward_room = (sig.size() - 1 - *idx) / span;
  const std::size_t backward_room = *idx / span;
  const bool forward = forward_room >= backward_room;
  const std::size_t room = forward ? forward_room : backward_room;
  int stages = 0;
  while (stages < policy.max_stages && (std::size_t{1} << stages) <= room) ++stages;
  if (stages < 2) throw GridError("signal too short around x=" + std::to_string(x) + " for a limit");

  LimitPolicy p = policy;
  p.ratio = 0.5;
  p.max_stages = stages;
  p.scale_with_x = false;
  p.delta0 = static_cast<double>(std::size_t{1} << (stages - 1)) * sig.dx;
  p.validate();
  const double delta0 = forward ? p.delta0 : -p.delta0;
  const auto sample_at = [&](double xv) -> cplx {
    const auto k = sig.index_of(xv);
    if (!k) throw GridError("stencil point off the sample grid");
    return sig.samples[*k];
  };
  return estimate_limit([&](double d) { return param_quotient(family, param_index, sample_at, x, d); }, delta0, p);
}

inline LimitResult generalized_derivative(const GeneralizedDerivativeRequest& req, double x) {
  const LimitPolicy policy = req.policy.value_or(LimitPolicy{});
  return std::visit(
      [&](const auto& d) -> LimitResult {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Expr>) {
          return generalized_derivative([&](double xv) { return eval(d, xv); }, req.family, req.param_index, x,
                                        policy);
        } else {
          return generalized_derivative(d, req.family, req.param_index, x, policy);
        }
      },
      req.derivand);
}

// ---------------------------------------------------------------------------
// Traces

/// Instantaneous parameter function sampled on a grid.
struct InstParamTrace {
  std::vector<double> grid;
  std::vector<cplx> values;
  std::vector<std::size_t> holes;  // sorted
  std::vector<double> est_error;

  std::size_t size() const { return grid.size(); }
  bool is_hole(std::size_t i) const { return std::binary_search(holes.begin(), holes.end(), i); }
  void mark_hole(std::size_t i) {
    const auto it = std::lower_bound(holes.begin(), holes.end(), i);
    if (it == holes.end() || *it != i) holes.insert(it, i);
    values[i] = cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
  }

  /// Exact grid hit (within 1e-9 of the local spacing).
  std::optional<std::size_t> index_of(double x) const {
    if (grid.empty()) return std::nullopt;
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    const double scale = grid.size() > 1 ? (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1) : 1.0;
    const double tol = 1e-9 * std::max(std::abs(scale), 1e-300);
    std::optional<std::size_t> best;
    for (auto cand : {it, it == grid.begin() ? it : it - 1}) {
      if (cand == grid.end()) continue;
      if (std::abs(*cand - x) <= tol) best = static_cast<std::size_t>(cand - grid.begin());
    }
    return best;
  }
};

namespace detail {

inline void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw GridError("empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw GridError("grid not strictly increasing");
}

}  // namespace detail

/// Evaluates `point(x) -> LimitResult` on the grid; failures become holes.
template <class PointFn>
InstParamTrace trace_of(std::span<const double> grid, PointFn&& point) {
  detail::check_grid(grid);
  InstParamTrace t;
  t.grid.assign(grid.begin(), grid.end());
  t.values.assign(grid.size(), cplx());
  t.est_error.assign(grid.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      const LimitResult r = point(grid[i]);
      if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag())) {
        t.mark_hole(i);
        continue;
      }
      t.values[i] = r.value;
      t.est_error[i] = r.est_error;
    } catch (const Error&) {
      t.mark_hole(i);
    }
  }
  return t;
}

inline InstParamTrace derivative_trace(const GeneralizedDerivativeRequest& req, std::span<const double> grid) {
  if (req.param_index >= req.family.arity()) throw std::invalid_argument("parameter index out of range");
  return trace_of(grid, [&](double x) { return generalized_derivative(req, x); });
}

template <class F>
InstParamTrace derivative_trace(F&& f, const Family& family, std::size_t param_index, std::span<const double> grid,
                                const LimitPolicy& policy = {}) {
  if (param_index >= family.arity()) throw std::invalid_argument("parameter index out of range");
  return trace_of(grid, [&](double x) { return generalized_derivative(f, family, param_index, x, policy); });
}

// ---------------------------------------------------------------------------
// Generalized integral

namespace detail {

inline std::size_t trace_index(const InstParamTrace& t, double x) {
  const auto i = t.index_of(x);
  if (!i) throw GridError("x=" + std::to_string(x) + " is not on the trace grid");
  if (t.is_hole(*i)) throw GridError("trace has a hole at x=" + std::to_string(x));
  return *i;
}

inline void check_common_grid(std::span<const InstParamTrace> traces) {
  for (const auto& t : traces)
    if (t.grid != traces.front().grid) throw GridError("traces do not share a grid");
}

}  // namespace detail

/// f(x) = h(x; D{p_0}(x), ..., D{p_{N-1}}(x)).
inline cplx reconstruct(const Family& family, std::span<const InstParamTrace> traces, double x) {
  if (traces.size() != family.arity())
    throw std::invalid_argument("reconstruct: need one trace per parameter of " + family.name());
  detail::check_common_grid(traces);
  const std::size_t i = detail::trace_index(traces.front(), x);
  std::vector<cplx> params(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) {
    if (traces[k].is_hole(i)) throw GridError("trace has a hole at x=" + std::to_string(x));
    params[k] = traces[k].values[i];
  }
  return family_eval(family, params, traces.front().grid[i]);
}

namespace detail {

// Trapezoid integral of v over grid[from..to] (either direction).
inline cplx trapezoid(std::span<const double> grid, std::span<const cplx> v, std::size_t from, std::size_t to) {
  cplx acc = 0.0;
  const int step = to >= from ? 1 : -1;
  for (std::size_t k = from; k != to; k = static_cast<std::size_t>(static_cast<long>(k) + step)) {
    const std::size_t n = static_cast<std::size_t>(static_cast<long>(k) + step);
    acc += 0.5 * (v[k] + v[n]) * (grid[n] - grid[k]);
  }
  return acc;
}

// First and second derivatives of a sampled function from the three-point
// Lagrange stencil around i (one-sided at the ends).
inline std::pair<cplx, cplx> local_derivatives(std::span<const double> g, std::span<const cplx> v, std::size_t i) {
  const std::size_t n = g.size();
  if (n < 3) throw GridError("need at least 3 grid points");
  const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
  const double x0 = g[c - 1], x1 = g[c], x2 = g[c + 1], x = g[i];
  const cplx y0 = v[c - 1], y1 = v[c], y2 = v[c + 1];
  const double d0 = (x0 - x1) * (x0 - x2), d1 = (x1 - x0) * (x1 - x2), d2 = (x2 - x0) * (x2 - x1);
  const cplx first = y0 * ((x - x1) + (x - x2)) / d0 + y1 * ((x - x0) + (x - x2)) / d1 + y2 * ((x - x0) + (x - x1)) / d2;
  const cplx second = 2.0 * (y0 / d0 + y1 / d1 + y2 / d2);
  return {first, second};
}

}  // namespace detail

/**
 * Generalized integral when some parameters vanished from the derivative.
 *
 * Each entry of `user_constants` supplies a missing parameter's value at the
 * origin, which restores the vanished term (k0 for the constant, k1 x for the
 * slope). The missing trace is recovered by integrating from x = 0, so the
 * trace grid must contain the origin. Only the linear family carries such a
 * compatibility relation here; other families need every trace.
 */
inline cplx reconstruct_partial(const Family& family, const std::map<std::size_t, InstParamTrace>& known,
                                const std::map<std::size_t, cplx>& user_constants, double x) {
  const std::size_t n = family.arity();
  for (std::size_t k = 0; k < n; ++k)
    if (!known.count(k) && !user_constants.count(k))
      throw std::invalid_argument("reconstruct_partial: missing parameter " + family.param_names()[k]);

  if (known.size() == n) {
    std::vector<InstParamTrace> all;
    for (std::size_t k = 0; k < n; ++k) all.push_back(known.at(k));
    return reconstruct(family, all, x);
  }
  if (!family.is_polynomial() || family.degree() != 1)
    throw NotIntegrable("partial reconstruction needs every parameter trace for family " + family.name());
  if (known.empty()) throw std::invalid_argument("reconstruct_partial: no parameter trace given");

  // Linear family: [a1, a0].
  const auto& [which, trace] = *known.begin();
  const std::span<const double> g(trace.grid);
  const std::span<const cplx> v(trace.values);
  const std::size_t target = detail::trace_index(trace, x);
  const std::size_t origin = detail::trace_index(trace, 0.0);
  const std::size_t lo = std::min(origin, target), hi = std::max(origin, target);
  for (std::size_t k = lo; k <= hi; ++k)
    if (trace.is_hole(k)) throw GridError("hole between the origin and x");

  if (which == 0) {
    // a1 = F', so F(x) = F(0) + int_0^x a1 and F(0) = a0(0) = k0.
    return user_constants.at(1) + detail::trapezoid(g, v, origin, target);
  }
  // a0 = F - x F' gives a1' = F'' = -a0'/x, with -a0''(0) at the origin.
  std::vector<cplx> curvature(g.size());
  const std::size_t from = std::max<std::size_t>(lo, 1) - 1, to = std::min(hi + 1, g.size() - 1);
  for (std::size_t k = from; k <= to; ++k) {
    const auto [d1, d2] = detail::local_derivatives(g, v, k);
    curvature[k] = k == origin ? -d2 : -d1 / g[k];
  }
  const cplx a1 = user_constants.at(0) + detail::trapezoid(g, curvature, origin, target);
  return a1 * g[target] + v[target];
}

}  // namespace gcalc
