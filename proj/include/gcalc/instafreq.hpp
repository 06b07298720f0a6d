#pragma once

// Instantaneous frequency from waveforms: chirp derivatives of real signals,
// Fourier derivatives of complex wave functions, and the amplitude spectrum
// built from the level sets of omega(x).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcalc/calculus.hpp"
#include "gcalc/derivators.hpp"
#include "gcalc/errors.hpp"
#include "gcalc/numerics.hpp"
#include "gcalc/sigio.hpp"

namespace gcalc {

struct ChirpDerivatives {
  InstParamTrace omega1;
  InstParamTrace omega0;
  InstParamTrace phi;
};

struct ChirpOptions {
  /// Use asin(2 f(x+d)) as the middle term of the omega1 quotient, as the
  /// formula is printed, instead of 2 asin(f(x+d)). Comparison only.
  bool literal_k1 = false;
};

namespace detail {

inline void share_holes(std::initializer_list<InstParamTrace*> traces) {
  std::vector<std::size_t> all;
  for (auto* t : traces) all.insert(all.end(), t->holes.begin(), t->holes.end());
  for (auto* t : traces)
    for (std::size_t i : all) t->mark_hole(i);
}

inline cplx complex_asin(cplx y) {
  return y.imag() == 0.0 && std::abs(y.real()) <= 1.0 ? cplx(std::asin(y.real()), 0.0)
                                                       : std::asin(cplx(y.real(), y.imag() == 0.0 ? 0.0 : y.imag()));
}

}  // namespace detail

/// D{omega1}, D{omega0}, D{phi} of a real waveform under the linear-chirp
/// derivator. Points where the arcsine linearization is singular (|f| = 1)
/// are holes in all three traces.
template <class F>
ChirpDerivatives chirp_derivatives(F&& f, std::span<const double> grid, const LimitPolicy& policy = {},
                                   const ChirpOptions& options = {}) {
  const Family chirp = Family::linear_chirp();
  ChirpDerivatives cd;
  if (options.literal_k1) {
    cd.omega1 = trace_of(grid, [&](double x) {
      const cplx y0 = f(x);
      if (y0.imag() == 0.0 && std::abs(1.0 - y0.real() * y0.real()) < kArcSingularity)
        throw SingularStencil("arcsine linearization singular");
      return estimate_limit(
          [&](double d) {
            const cplx k0 = detail::complex_asin(f(x));
            const cplx k1 = detail::complex_asin(2.0 * cplx(f(x + d)));
            const cplx k2 = detail::complex_asin(f(x + 2.0 * d));
            return (k0 - k1 + k2) / (2.0 * std::numbers::pi * d * d);
          },
          policy.first_step(x), policy);
    });
  } else {
    cd.omega1 = derivative_trace(f, chirp, 0, grid, policy);
  }
  cd.omega0 = derivative_trace(f, chirp, 1, grid, policy);
  cd.phi = derivative_trace(f, chirp, 2, grid, policy);
  detail::share_holes({&cd.omega1, &cd.omega0, &cd.phi});
  return cd;
}

/// Sampled real waveform; stencils use sample spacings only.
inline ChirpDerivatives chirp_derivatives(const SampledSignal& f, std::span<const double> grid,
                                          const LimitPolicy& policy = {}) {
  const Family chirp = Family::linear_chirp();
  const auto trace = [&](std::size_t k) {
    return trace_of(grid, [&](double x) { return generalized_derivative(f, chirp, k, x, policy); });
  };
  ChirpDerivatives cd{trace(0), trace(1), trace(2)};
  detail::share_holes({&cd.omega1, &cd.omega0, &cd.phi});
  return cd;
}

enum class SignMode { Continuity, Absolute };

struct FrequencyTrace {
  std::vector<double> grid;
  std::vector<double> omega;
  std::vector<std::size_t> holes;  // sorted

  bool is_hole(std::size_t i) const { return std::binary_search(holes.begin(), holes.end(), i); }
};

/**
 * omega(x) = D{omega1}(x) x + D{omega0}(x).
 *
 * The arcsine branch flips the sign of (omega1, omega0) together wherever the
 * principal branch runs against the phase. Absolute mode takes |omega| per
 * point. Continuity mode picks each point's sign to continue the trace
 * linearly from its predecessors, then negates the whole trace if most
 * values came out negative; genuine sign changes of omega survive.
 */
inline FrequencyTrace instantaneous_frequency(const ChirpDerivatives& cd, SignMode mode = SignMode::Continuity) {
  if (cd.omega1.grid != cd.omega0.grid) throw GridError("chirp traces do not share a grid");
  FrequencyTrace ft;
  ft.grid = cd.omega1.grid;
  ft.omega.assign(ft.grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < ft.grid.size(); ++i) {
    if (cd.omega1.is_hole(i) || cd.omega0.is_hole(i)) {
      ft.holes.push_back(i);
      continue;
    }
    const double w = (cd.omega1.values[i] * ft.grid[i] + cd.omega0.values[i]).real();
    if (!std::isfinite(w)) {
      ft.holes.push_back(i);
      continue;
    }
    ft.omega[i] = mode == SignMode::Absolute ? std::abs(w) : w;
  }
  if (mode == SignMode::Absolute) return ft;

  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < ft.grid.size(); ++i)
    if (!ft.is_hole(i)) valid.push_back(i);
  for (std::size_t n = 1; n < valid.size(); ++n) {
    const std::size_t i = valid[n], p = valid[n - 1];
    double predicted = ft.omega[p];
    if (n >= 2) {
      const std::size_t q = valid[n - 2];
      const double slope = (ft.omega[p] - ft.omega[q]) / (ft.grid[p] - ft.grid[q]);
      predicted += slope * (ft.grid[i] - ft.grid[p]);
    }
    if (std::abs(-ft.omega[i] - predicted) < std::abs(ft.omega[i] - predicted)) ft.omega[i] = -ft.omega[i];
  }
  const auto negatives = std::count_if(valid.begin(), valid.end(), [&](std::size_t i) { return ft.omega[i] < 0.0; });
  if (2 * static_cast<std::size_t>(negatives) > valid.size())
    for (std::size_t i : valid) ft.omega[i] = -ft.omega[i];
  return ft;
}

struct FourierDerivatives {
  InstParamTrace omega;
  InstParamTrace b;
};

/// Magnitude below which a wave function sample has no usable logarithm.
inline constexpr double kWaveFloor = 1e-12;

/**
 * D{omega} and D{b} of a complex wave function under e^(-i omega x + b).
 *
 * b carries the phase of psi, defined modulo 2 pi i. Its imaginary part is
 * unwrapped along the grid, pinned to the principal branch at the grid point
 * nearest the origin (where the omega x term vanishes).
 */
namespace detail {

// Im(b) is unwrapped along the grid and pinned to the principal branch at
// the valid point nearest the origin.
inline void align_phase(InstParamTrace& b) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!b.is_hole(i)) valid.push_back(i);
  if (valid.empty()) return;
  std::vector<double> phase(valid.size());
  for (std::size_t n = 0; n < valid.size(); ++n) phase[n] = b.values[valid[n]].imag();
  const auto unwrapped = unwrap_branch(std::span<const double>(phase), 2.0 * std::numbers::pi);
  const auto anchor = static_cast<std::size_t>(
      std::min_element(valid.begin(), valid.end(),
                       [&](std::size_t a, std::size_t c) { return std::abs(b.grid[a]) < std::abs(b.grid[c]); }) -
      valid.begin());
  const double shift = unwrapped[anchor] - phase[anchor];
  for (std::size_t n = 0; n < valid.size(); ++n) {
    cplx& v = b.values[valid[n]];
    v = cplx(v.real(), unwrapped[n] - shift);
  }
}

}  // namespace detail

/**
 * D{omega} and D{b} of a complex wave function under e^(-i omega x + b).
 *
 * b carries the phase of psi, defined modulo 2 pi i. Its imaginary part is
 * unwrapped along the grid, pinned to the principal branch at the grid point
 * nearest the origin (where the omega x term vanishes).
 */
template <class Psi>
FourierDerivatives fourier_derivative(Psi&& psi, std::span<const double> grid, const LimitPolicy& policy = {}) {
  const Family kernel = Family::fourier_kernel();
  const auto guarded = [&](std::size_t k) {
    return [&, k](double x) {
      if (std::abs(cplx(psi(x))) < kWaveFloor) throw DomainError("wave function vanishes");
      return generalized_derivative(psi, kernel, k, x, policy);
    };
  };
  FourierDerivatives fd{trace_of(grid, guarded(0)), trace_of(grid, guarded(1))};
  detail::share_holes({&fd.omega, &fd.b});
  detail::align_phase(fd.b);
  return fd;
}

/// Sampled wave function; stencils use sample spacings only.
inline FourierDerivatives fourier_derivative(const SampledSignal& psi, std::span<const double> grid,
                                             const LimitPolicy& policy = {}) {
  const Family kernel = Family::fourier_kernel();
  const auto guarded = [&](std::size_t k) {
    return [&, k](double x) {
      const auto i = psi.index_of(x);
      if (i && std::abs(psi.samples[*i]) < kWaveFloor) throw DomainError("wave function vanishes");
      return generalized_derivative(psi, kernel, k, x, policy);
    };
  };
  FourierDerivatives fd{trace_of(grid, guarded(0)), trace_of(grid, guarded(1))};
  detail::share_holes({&fd.omega, &fd.b});
  detail::align_phase(fd.b);
  return fd;
}

/// psi(x) = e^(-i D{omega}(x) x + D{b}(x)) at a grid point.
inline cplx wavefunction_reconstruct(const InstParamTrace& omega, const InstParamTrace& b, double x) {
  const InstParamTrace traces[] = {omega, b};
  return reconstruct(Family::fourier_kernel(), traces, x);
}

struct AmplitudeSpectrum {
  std::vector<double> bin_centers;
  /// Unset where the bin centre is within half a bin of zero.
  std::vector<std::optional<double>> values;
  double bin_width = 0.0;
};

/**
 * F(w) = (1/w) * integral of omega(x) over {x : omega(x) in bin(w)}.
 *
 * Bins are [c - dw/2, c + dw/2) with centres c = j*dw; the integral is the
 * trapezoid-weighted sum of the member samples. Holes contribute nothing.
 */
inline AmplitudeSpectrum amplitude_spectrum(const FrequencyTrace& ft, double delta_omega) {
  if (!(delta_omega > 0.0)) throw std::invalid_argument("amplitude_spectrum: bin width must be > 0");
  const std::size_t n = ft.grid.size();
  if (n < 2) throw std::invalid_argument("amplitude_spectrum: need at least two points");

  std::map<long long, double> sums;
  for (std::size_t k = 0; k < n; ++k) {
    if (ft.is_hole(k)) continue;
    const double lo = ft.grid[k == 0 ? 0 : k - 1];
    const double hi = ft.grid[k + 1 == n ? k : k + 1];
    const double weight = 0.5 * (hi - lo);
    const auto bin = static_cast<long long>(std::floor(ft.omega[k] / delta_omega + 0.5));
    sums[bin] += weight * ft.omega[k];
  }
  if (sums.empty()) throw std::invalid_argument("amplitude_spectrum: trace has no valid points");

  AmplitudeSpectrum out;
  out.bin_width = delta_omega;
  for (long long j = sums.begin()->first; j <= sums.rbegin()->first; ++j) {
    const double centre = static_cast<double>(j) * delta_omega;
    out.bin_centers.push_back(centre);
    if (std::abs(centre) < delta_omega / 2.0) {
      out.values.push_back(std::nullopt);
      continue;
    }
    const auto it = sums.find(j);
    out.values.push_back(it == sums.end() ? 0.0 : it->second / centre);
  }
  return out;
}

}  // namespace gcalc
