#pragma once

// Derivator / integrator families and exact solves of their N-point systems.
//
// Parameter vectors are ordered as the families are written:
//   polynomial  [a_n, ..., a_1, a_0]     sum a_i x^i
//   exponential [a, b]                   e^(a x + b)
//   sine/cos/tan [omega, phi]            sin/cos/tan(omega x + phi)
//   chirp       [omega1, omega0, phi]    sin(2 pi (omega1 x^2 / 2 + omega0 x) + phi)
//   fourier     [omega, b]               e^(-i omega x + b)

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gcalc/errors.hpp"
#include "gcalc/types.hpp"
#include "gcalc/numerics.hpp"

namespace gcalc {


enum class FamilyKind { Linear, Polynomial, Exponential, Sine, Cosine, Tangent, LinearChirp, FourierKernel };

class Family {
 public:
  static Family linear() { return Family(FamilyKind::Linear, 1); }
  static Family polynomial(int degree) {
    if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
    return Family(FamilyKind::Polynomial, degree);
  }
  static Family exponential() { return Family(FamilyKind::Exponential); }
  static Family sine() { return Family(FamilyKind::Sine); }
  static Family cosine() { return Family(FamilyKind::Cosine); }
  static Family tangent() { return Family(FamilyKind::Tangent); }
  static Family linear_chirp() { return Family(FamilyKind::LinearChirp); }
  static Family fourier_kernel() { return Family(FamilyKind::FourierKernel); }

  /// Parses the CLI identifiers: linear, poly:<n>, exp, sin, cos, tan, chirp, fourier.
  static Family from_name(std::string_view name) {
    if (name == "linear") return linear();
    if (name == "exp") return exponential();
    if (name == "sin") return sine();
    if (name == "cos") return cosine();
    if (name == "tan") return tangent();
    if (name == "chirp") return linear_chirp();
    if (name == "fourier") return fourier_kernel();
    if (name.substr(0, 5) == "poly:") {
      const auto digits = name.substr(5);
      int n = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1) return polynomial(n);
    }
    throw std::invalid_argument("unknown family '" + std::string(name) + "'");
  }

  FamilyKind kind() const { return kind_; }
  int degree() const { return degree_; }
  bool is_polynomial() const { return kind_ == FamilyKind::Linear || kind_ == FamilyKind::Polynomial; }

  std::size_t arity() const {
    switch (kind_) {
      case FamilyKind::Linear:
      case FamilyKind::Polynomial: return static_cast<std::size_t>(degree_) + 1;
      case FamilyKind::LinearChirp: return 3;
      default: return 2;
    }
  }

  std::vector<std::string> param_names() const {
    switch (kind_) {
      case FamilyKind::Linear:
      case FamilyKind::Polynomial: {
        std::vector<std::string> names;
        for (int i = degree_; i >= 0; --i) names.push_back("a" + std::to_string(i));
        return names;
      }
      case FamilyKind::Exponential: return {"a", "b"};
      case FamilyKind::Sine:
      case FamilyKind::Cosine:
      case FamilyKind::Tangent: return {"omega", "phi"};
      case FamilyKind::LinearChirp: return {"omega1", "omega0", "phi"};
      case FamilyKind::FourierKernel: return {"omega", "b"};
    }
    return {};
  }

  /// Index of a named parameter; "w" is accepted for "omega".
  std::size_t param_index(std::string_view name) const {
    const auto names = param_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == name) return k;
      if (names[k].rfind("omega", 0) == 0 && !name.empty() && name[0] == 'w' && "omega" + std::string(name.substr(1)) == names[k])
        return k;
    }
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "' for family " + this->name());
  }

  std::string name() const {
    switch (kind_) {
      case FamilyKind::Linear: return "linear";
      case FamilyKind::Polynomial: return "poly:" + std::to_string(degree_);
      case FamilyKind::Exponential: return "exp";
      case FamilyKind::Sine: return "sin";
      case FamilyKind::Cosine: return "cos";
      case FamilyKind::Tangent: return "tan";
      case FamilyKind::LinearChirp: return "chirp";
      case FamilyKind::FourierKernel: return "fourier";
    }
    return "?";
  }

  bool operator==(const Family&) const = default;

 private:
  explicit Family(FamilyKind k, int degree = 0) : kind_(k), degree_(degree) {}
  FamilyKind kind_;
  int degree_;
};

struct StencilSamples {
  std::vector<double> xs;
  std::vector<cplx> ys;
};

struct StencilSolution {
  std::vector<cplx> params;
  /// Set when another branch of an inverse function fit the samples almost
  /// as well; the principal-branch solution is still returned.
  bool branch_ambiguous = false;
};

namespace detail {

inline void require_arity(const Family& f, std::size_t n) {
  if (n != f.arity())
    throw std::invalid_argument("family " + f.name() + " expects " + std::to_string(f.arity()) + " parameters, got " +
                                std::to_string(n));
}

// Linear combination phase = omega x + phi of the trig families.
inline cplx linear_phase(std::span<const cplx> p, cplx x) { return p[0] * x + p[1]; }

}  // namespace detail

/// Evaluates the family's forward model h(x; params).
inline cplx family_eval(const Family& family, std::span<const cplx> params, cplx x) {
  detail::require_arity(family, params.size());
  switch (family.kind()) {
    case FamilyKind::Linear:
    case FamilyKind::Polynomial: {
      cplx acc = 0.0;
      for (const cplx& a : params) acc = acc * x + a;
      return acc;
    }
    case FamilyKind::Exponential: return std::exp(params[0] * x + params[1]);
    case FamilyKind::Sine: return std::sin(detail::linear_phase(params, x));
    case FamilyKind::Cosine: return std::cos(detail::linear_phase(params, x));
    case FamilyKind::Tangent: {
      const cplx theta = detail::linear_phase(params, x);
      const cplx c = std::cos(theta);
      // cos of a rounded pole is ~1e-17, never exactly zero.
      if (std::abs(c) < 1e-15) throw EvalError("tangent pole", x.real());
      return std::sin(theta) / c;
    }
    case FamilyKind::LinearChirp: {
      const cplx phase = 2.0 * std::numbers::pi * (0.5 * params[0] * x * x + params[1] * x) + params[2];
      return std::sin(phase);
    }
    case FamilyKind::FourierKernel: return std::exp(cplx(0.0, -1.0) * params[0] * x + params[1]);
  }
  return {};
}

inline cplx family_eval(const Family& family, std::span<const cplx> params, double x) {
  return family_eval(family, params, cplx(x, 0.0));
}

namespace detail {

inline void check_stencil(const Family& family, const StencilSamples& s) {
  if (s.xs.size() != s.ys.size()) throw std::invalid_argument("stencil: xs and ys differ in length");
  if (s.xs.size() != family.arity())
    throw std::invalid_argument("stencil: family " + family.name() + " needs " + std::to_string(family.arity()) +
                                " points");
  for (std::size_t k = 1; k < s.xs.size(); ++k)
    if (s.xs[k] == s.xs[0] || s.xs[k] == s.xs[k - 1]) throw SingularStencil("duplicate stencil abscissae");
  const bool up = s.xs[1] > s.xs[0];
  for (std::size_t k = 1; k < s.xs.size(); ++k)
    if ((s.xs[k] > s.xs[k - 1]) != up) throw std::invalid_argument("stencil: abscissae not monotone");
}

/// Interpolating polynomial through (xs, ys): Newton divided differences,
/// then expansion to monomial coefficients, highest degree first.
inline std::vector<cplx> vandermonde_solve(std::span<const double> xs, std::span<const cplx> ys) {
  const std::size_t n = xs.size();
  std::vector<cplx> dd(ys.begin(), ys.end());
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  // Horner expansion of sum dd[j] * prod_{i<j} (x - xs[i]); poly[k] is the
  // coefficient of x^k.
  std::vector<cplx> poly{dd[n - 1]};
  for (std::size_t j = n - 1; j-- > 0;) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= poly[k] * xs[j];
    }
    next[0] += dd[j];
    poly = std::move(next);
  }
  std::reverse(poly.begin(), poly.end());
  return poly;
}


inline cplx principal_asin(cplx y) {
  return is_real(y) && std::abs(y.real()) <= 1.0 ? cplx(std::asin(y.real()), 0.0) : std::asin(cplx(y.real(), y.imag() == 0.0 ? 0.0 : y.imag()));
}
inline cplx principal_acos(cplx y) {
  return is_real(y) && std::abs(y.real()) <= 1.0 ? cplx(std::acos(y.real()), 0.0) : std::acos(cplx(y.real(), y.imag() == 0.0 ? 0.0 : y.imag()));
}
inline cplx principal_atan(cplx y) {
  return is_real(y) ? cplx(std::atan(y.real()), 0.0) : std::atan(y);
}

// Inverse branches of one trig family: every solution of h(theta) = y is
// base + period * n for some base in `bases`.
struct BranchSet {
  std::array<cplx, 2> bases;
  std::size_t count;
  double period;
};

inline BranchSet branches(FamilyKind kind, cplx y) {
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case FamilyKind::Cosine: {
      const cplx u = principal_acos(y);
      return {{u, -u}, 2, 2.0 * pi};
    }
    case FamilyKind::Tangent: return {{principal_atan(y), cplx()}, 1, pi};
    default: {
      const cplx u = principal_asin(y);
      return {{u, pi - u}, 2, 2.0 * pi};
    }
  }
}

struct Candidate {
  cplx theta;
  double distance;
};

// The `keep` branch values closest to `target`, nearest first.
inline std::vector<Candidate> nearest_branches(const BranchSet& set, cplx target, std::size_t keep) {
  std::vector<Candidate> all;
  for (std::size_t b = 0; b < set.count; ++b) {
    const double n0 = std::round((target.real() - set.bases[b].real()) / set.period);
    for (int dn = -1; dn <= 1; ++dn) {
      const cplx theta = set.bases[b] + set.period * (n0 + dn);
      all.push_back({theta, std::abs(theta - target)});
    }
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
  // Coincident branches (y at an extremum) are one candidate.
  std::vector<Candidate> out;
  for (const auto& c : all) {
    if (!out.empty() && std::abs(c.theta - out.back().theta) < 1e-14 * (1.0 + std::abs(c.theta))) continue;
    out.push_back(c);
    if (out.size() == keep) break;
  }
  return out;
}

/// Phase values theta_k with h(theta_k) = ys[k] for a trig family: principal
/// branch at the base point, then the branch sequence of least curvature.
inline std::vector<cplx> continue_phase(FamilyKind kind, std::span<const cplx> ys, bool& ambiguous) {
  const std::size_t n = ys.size();
  std::vector<cplx> theta(n);
  theta[0] = branches(kind, ys[0]).bases[0];
  if (n == 1) return theta;

  const auto first = nearest_branches(branches(kind, ys[1]), theta[0], 2);
  std::vector<cplx> best;
  double best_score = std::numeric_limits<double>::infinity();
  double second_score = std::numeric_limits<double>::infinity();
  for (const auto& c1 : first) {
    std::vector<cplx> seq{theta[0], c1.theta};
    for (std::size_t k = 2; k < n; ++k) {
      const cplx predicted = 2.0 * seq[k - 1] - seq[k - 2];
      seq.push_back(nearest_branches(branches(kind, ys[k]), predicted, 1).front().theta);
    }
    double score = 0.0;
    if (n == 2) {
      score = std::abs(seq[1] - seq[0]);
    } else {
      for (std::size_t k = 2; k < n; ++k) score += std::abs(seq[k] - 2.0 * seq[k - 1] + seq[k - 2]);
    }
    if (score < best_score) {
      second_score = best_score;
      best_score = score;
      best = std::move(seq);
    } else if (score < second_score) {
      second_score = score;
    }
  }
  ambiguous = second_score < 2.0 * best_score;
  return best;
}

}  // namespace detail

/// Threshold on 1 - f^2 below which an arcsine/arccosine linearization at the
/// stencil base point is treated as singular.
inline constexpr double kArcSingularity = 1e-12;

/// Unique parameter vector reproducing the stencil samples exactly.
inline StencilSolution solve_stencil(const Family& family, const StencilSamples& s) {
  detail::check_stencil(family, s);
  StencilSolution sol;
  const std::span<const double> xs(s.xs);

  switch (family.kind()) {
    case FamilyKind::Linear:
    case FamilyKind::Polynomial: sol.params = detail::vandermonde_solve(xs, s.ys); break;

    case FamilyKind::Exponential:
    case FamilyKind::FourierKernel: {
      std::vector<cplx> logs(s.ys.size());
      for (std::size_t k = 0; k < logs.size(); ++k) {
        if (s.ys[k] == cplx(0.0, 0.0)) throw DomainError("logarithm of zero in stencil");
        const cplx y = s.ys[k];
        logs[k] = detail::is_real(y) && y.real() > 0.0 ? cplx(std::log(y.real()), 0.0)
                                                       : std::log(cplx(y.real(), y.imag() == 0.0 ? 0.0 : y.imag()));
      }
      // Unwrap the phase (imaginary part of the logarithm) along the stencil.
      std::vector<cplx> phases(logs.size());
      for (std::size_t k = 0; k < logs.size(); ++k) phases[k] = logs[k].imag();
      const auto unwrapped = unwrap_branch(std::span<const cplx>(phases), 2.0 * std::numbers::pi);
      for (std::size_t k = 0; k < logs.size(); ++k) logs[k] = cplx(logs[k].real(), unwrapped[k].real());
      const auto line = detail::vandermonde_solve(xs, logs);
      if (family.kind() == FamilyKind::Exponential) {
        sol.params = {line[0], line[1]};
      } else {
        // slope = -i omega
        sol.params = {cplx(0.0, 1.0) * line[0], line[1]};
      }
      break;
    }

    case FamilyKind::Sine:
    case FamilyKind::Cosine:
    case FamilyKind::Tangent:
    case FamilyKind::LinearChirp: {
      const cplx y0 = s.ys[0];
      if (family.kind() != FamilyKind::Tangent && detail::is_real(y0) &&
          std::abs(1.0 - y0.real() * y0.real()) < kArcSingularity)
        throw SingularStencil("inverse-trig linearization singular (|f| = 1)");
      const auto theta = detail::continue_phase(family.kind(), s.ys, sol.branch_ambiguous);
      const auto fit = detail::vandermonde_solve(xs, theta);
      if (family.kind() == FamilyKind::LinearChirp) {
        // theta = pi omega1 x^2 + 2 pi omega0 x + phi
        sol.params = {fit[0] / std::numbers::pi, fit[1] / (2.0 * std::numbers::pi), fit[2]};
      } else {
        sol.params = {fit[0], fit[1]};
      }
      break;
    }
  }
  return sol;
}

/// Component `param_index` of the stencil solve at step `delta`: the
/// pre-limit quotient of the generalized derivative.
template <class F>
cplx param_quotient(const Family& family, std::size_t param_index, F&& f, double x, double delta) {
  if (param_index >= family.arity()) throw std::invalid_argument("parameter index out of range");
  StencilSamples s;
  s.xs = stencil(x, delta, family.arity());
  s.ys.reserve(s.xs.size());
  for (double xk : s.xs) s.ys.push_back(cplx(f(xk)));
  return solve_stencil(family, s).params[param_index];
}

namespace detail {

inline double wrap_to(double v, double period) {
  // into (-period/2, period/2]
  double r = std::remainder(v, period);
  if (r <= -period / 2.0) r += period;
  return r;
}

}  // namespace detail

/**
 * Representative of the parameter vectors that define the same function.
 *
 * Inverse-trig and logarithm solves are unique only up to each family's
 * symmetries: sin(w x + p) = sin(-w x + pi - p), cos is even, tan has period
 * pi, and e^(... + b) is unchanged by b -> b + 2 pi i. The representative has
 * a non-negative leading frequency and a wrapped phase.
 */
inline std::vector<cplx> canonical_params(const Family& family, std::span<const cplx> params) {
  detail::require_arity(family, params.size());
  constexpr double pi = std::numbers::pi;
  std::vector<cplx> p(params.begin(), params.end());
  const auto wrap_real = [](cplx z, double period) { return cplx(detail::wrap_to(z.real(), period), z.imag()); };
  const auto wrap_imag = [](cplx z, double period) { return cplx(z.real(), detail::wrap_to(z.imag(), period)); };
  switch (family.kind()) {
    case FamilyKind::Sine:
      if (p[0].real() < 0.0) p = {-p[0], pi - p[1]};
      p[1] = wrap_real(p[1], 2.0 * pi);
      break;
    case FamilyKind::Cosine:
      if (p[0].real() < 0.0) p = {-p[0], -p[1]};
      p[1] = wrap_real(p[1], 2.0 * pi);
      break;
    case FamilyKind::Tangent: p[1] = wrap_real(p[1], pi); break;
    case FamilyKind::LinearChirp:
      if (p[1].real() < 0.0 || (p[1].real() == 0.0 && p[0].real() < 0.0)) p = {-p[0], -p[1], pi - p[2]};
      p[2] = wrap_real(p[2], 2.0 * pi);
      break;
    case FamilyKind::Exponential:
    case FamilyKind::FourierKernel: p[1] = wrap_imag(p[1], 2.0 * pi); break;
    default: break;
  }
  return p;
}

}  // namespace gcalc
