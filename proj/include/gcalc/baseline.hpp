#pragma once

// Classical time-frequency baseline: DFT, Gabor spectrogram, ridge
// extraction and second-moment uncertainty widths. Frequencies are in
// cycles per unit of x (Hz when x is seconds).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcalc/errors.hpp"
#include "gcalc/instafreq.hpp"
#include "gcalc/sigio.hpp"

namespace gcalc {

namespace detail {

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

inline void fft_radix2(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::vector<cplx> dft_direct(std::span<const cplx> x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      acc += x[j] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace detail

/// X_k = sum_j x_j e^(-2 pi i jk/N). Radix-2 for powers of two, O(N^2) otherwise.
inline std::vector<cplx> dft(std::span<const cplx> x) {
  if (x.empty()) throw std::invalid_argument("dft: no samples");
  if (detail::is_pow2(x.size())) {
    std::vector<cplx> a(x.begin(), x.end());
    detail::fft_radix2(a);
    return a;
  }
  return detail::dft_direct(x);
}

/// Inverse of dft (1/N normalization).
inline std::vector<cplx> idft(std::span<const cplx> X) {
  std::vector<cplx> conj(X.size());
  std::transform(X.begin(), X.end(), conj.begin(), [](cplx z) { return std::conj(z); });
  auto out = dft(conj);
  const double n = static_cast<double>(X.size());
  for (auto& z : out) z = std::conj(z) / n;
  return out;
}

enum class FrequencyLayout { FromZero, Centered };

struct Spectrum {
  std::vector<double> freqs;
  std::vector<cplx> coeffs;
};

inline Spectrum dft(const SampledSignal& signal, FrequencyLayout layout = FrequencyLayout::FromZero) {
  const std::size_t n = signal.size();
  Spectrum s;
  s.coeffs = dft(std::span<const cplx>(signal.samples));
  s.freqs.resize(n);
  const double df = 1.0 / (static_cast<double>(n) * signal.dx);
  for (std::size_t k = 0; k < n; ++k) s.freqs[k] = static_cast<double>(k) * df;
  if (layout == FrequencyLayout::Centered) {
    const std::size_t half = n / 2;  // index of -fs/2 (or nearest) after rotation
    std::rotate(s.coeffs.begin(), s.coeffs.begin() + static_cast<long>(n - half), s.coeffs.end());
    for (std::size_t k = 0; k < n; ++k) s.freqs[k] = (static_cast<double>(k) - static_cast<double>(half)) * df;
  }
  return s;
}

namespace detail {

// Signed frequency index of bin k in the standard layout.
inline double signed_bin(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

struct SymmetricGrid {
  double x0;
  double dx;
  std::size_t n;
  double x(std::size_t k) const { return x0 + static_cast<double>(k) * dx; }
};

inline SymmetricGrid symmetric_grid(std::size_t n, double span) {
  if (n < 2) throw std::invalid_argument("need at least two samples");
  if (!(span > 0.0)) throw std::invalid_argument("span must be > 0");
  return {-span / 2.0, span / static_cast<double>(n), n};
}

}  // namespace detail

struct GaussianPairReport {
  double max_abs_error;
  /// Numerical transform at omega = 0; closed form 1/sqrt(2 sigma).
  double peak;
};

/**
 * Samples e^(-sigma x^2) on [-span/2, span/2), transforms with continuous
 * scaling (dx and the unitary 1/sqrt(2 pi)), and compares with
 * 1/sqrt(2 sigma) e^(-w^2 / (4 sigma)) on the angular-frequency axis.
 */
inline GaussianPairReport gaussian_pair_check(double sigma, std::size_t n, double span) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_pair_check: sigma must be > 0");
  const auto g = detail::symmetric_grid(n, span);
  if (std::exp(-sigma * (span / 2.0) * (span / 2.0)) > 1e-12)
    throw AliasingError("gaussian_pair_check: span too narrow, tail exceeds 1e-12");
  const double nyquist = std::numbers::pi / g.dx;
  if (std::exp(-nyquist * nyquist / (4.0 * sigma)) > 1e-12)
    throw AliasingError("gaussian_pair_check: sampling too coarse, spectrum aliased");

  std::vector<cplx> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::exp(-sigma * g.x(k) * g.x(k));
  const auto X = dft(std::span<const cplx>(x));
  const double scale = g.dx / std::sqrt(2.0 * std::numbers::pi);
  double worst = 0.0;
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 2.0 * std::numbers::pi * detail::signed_bin(k, n) / (static_cast<double>(n) * g.dx);
    const cplx numeric = scale * X[k] * std::polar(1.0, -w * g.x0);
    const double exact = std::exp(-w * w / (4.0 * sigma)) / std::sqrt(2.0 * sigma);
    worst = std::max(worst, std::abs(numeric - exact));
    if (k == 0) peak = numeric.real();
  }
  return {worst, peak};
}

struct Spectrogram {
  std::vector<double> times;
  std::vector<double> freqs;
  std::vector<std::vector<double>> magnitudes;  // [time][freq]
  double window_sigma = 0.0;

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

/**
 * Gabor transform: frames centred every `hop` samples, unit-peak Gaussian
 * window of standard deviation `window_sigma` (units of x) truncated at
 * +-4 sigma, zero padding beyond the signal and up to a power-of-two frame.
 * Magnitudes are scaled by 2 / sum(window) so a unit sinusoid peaks near 1.
 * Only non-negative frequencies are kept.
 */
inline Spectrogram stft(const SampledSignal& signal, double window_sigma, std::size_t hop) {
  if (!(window_sigma > 0.0)) throw std::invalid_argument("stft: window_sigma must be > 0");
  if (hop < 1) throw std::invalid_argument("stft: hop must be >= 1");
  if (static_cast<double>(signal.size()) * signal.dx < window_sigma)
    throw GridError("stft: signal shorter than one window standard deviation");

  const auto half = static_cast<std::size_t>(std::ceil(4.0 * window_sigma / signal.dx));
  std::size_t frame = 1;
  while (frame < 2 * half + 1) frame <<= 1;

  std::vector<double> window(2 * half + 1);
  double wsum = 0.0;
  for (std::size_t t = 0; t < window.size(); ++t) {
    const double u = (static_cast<double>(t) - static_cast<double>(half)) * signal.dx / window_sigma;
    window[t] = std::exp(-0.5 * u * u);
    wsum += window[t];
  }

  Spectrogram sg;
  sg.window_sigma = window_sigma;
  const std::size_t bins = frame / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) sg.freqs.push_back(static_cast<double>(k) / (static_cast<double>(frame) * signal.dx));

  std::vector<cplx> buf(frame);
  for (std::size_t c = 0; c < signal.size(); c += hop) {
    std::fill(buf.begin(), buf.end(), cplx());
    for (std::size_t t = 0; t < window.size(); ++t) {
      const long idx = static_cast<long>(c) + static_cast<long>(t) - static_cast<long>(half);
      if (idx < 0 || idx >= static_cast<long>(signal.size())) continue;
      buf[t] = signal.samples[static_cast<std::size_t>(idx)] * window[t];
    }
    const auto X = dft(std::span<const cplx>(buf));
    std::vector<double> mags(bins);
    for (std::size_t k = 0; k < bins; ++k) mags[k] = 2.0 * std::abs(X[k]) / wsum;
    sg.times.push_back(signal.x(c));
    sg.magnitudes.push_back(std::move(mags));
  }
  return sg;
}

struct RidgeResult {
  FrequencyTrace trace;
  /// Frames whose magnitudes were all zero (reported at 0 Hz).
  std::vector<std::size_t> degenerate;
};

/// Per-frame argmax frequency; ties go to the lower frequency.
inline RidgeResult ridge(const Spectrogram& sg) {
  if (sg.times.empty() || sg.freqs.empty()) throw std::invalid_argument("ridge: empty spectrogram");
  RidgeResult r;
  r.trace.grid = sg.times;
  for (std::size_t t = 0; t < sg.times.size(); ++t) {
    const auto& row = sg.magnitudes[t];
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[best]) best = k;
    if (row[best] <= 0.0) r.degenerate.push_back(t);
    r.trace.omega.push_back(sg.freqs[best]);
  }
  return r;
}

/// Second-moment width of frame `t` (magnitude-squared weights), in Hz.
inline double frequency_spread(const Spectrogram& sg, std::size_t t) {
  const auto& row = sg.magnitudes.at(t);
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double p = row[k] * row[k];
    w += p;
    m1 += p * sg.freqs[k];
    m2 += p * sg.freqs[k] * sg.freqs[k];
  }
  if (w == 0.0) return 0.0;
  const double mean = m1 / w;
  return std::sqrt(std::max(0.0, m2 / w - mean * mean));
}

enum class WindowKind { Gaussian, Rectangular };

struct UncertaintyReport {
  double sigma_x;
  double sigma_f;
  double product;
};

/**
 * Second-moment widths of a window's intensity |g|^2 in x and of |G|^2 on
 * the ordinary-frequency axis. Gaussian: e^(-x^2 / (2 sigma^2)); its product
 * is 1/(4 pi). Rectangular: indicator of |x| <= sigma.
 */
inline UncertaintyReport uncertainty_product(double window_sigma, std::size_t n, double span,
                                             WindowKind kind = WindowKind::Gaussian) {
  if (!(window_sigma > 0.0)) throw std::invalid_argument("uncertainty_product: sigma must be > 0");
  const auto g = detail::symmetric_grid(n, span);
  if (kind == WindowKind::Gaussian) {
    const double tail = span / (2.0 * window_sigma);
    if (std::exp(-0.5 * tail * tail) > 1e-12)
      throw AliasingError("uncertainty_product: span too narrow for the window");
    const double nyquist = 1.0 / (2.0 * g.dx);
    const double a = 2.0 * std::numbers::pi * window_sigma * nyquist;
    if (std::exp(-0.5 * a * a) > 1e-12) throw AliasingError("uncertainty_product: sampling too coarse");
  }

  std::vector<cplx> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = g.x(k);
    w[k] = kind == WindowKind::Gaussian ? std::exp(-0.5 * (x / window_sigma) * (x / window_sigma))
                                        : (std::abs(x) <= window_sigma ? 1.0 : 0.0);
  }
  const auto moments = [](auto&& coord, auto&& weight, std::size_t count) {
    double s = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double p = weight(k), c = coord(k);
      s += p;
      m1 += p * c;
      m2 += p * c * c;
    }
    const double mean = m1 / s;
    return std::sqrt(std::max(0.0, m2 / s - mean * mean));
  };
  const double sx = moments([&](std::size_t k) { return g.x(k); }, [&](std::size_t k) { return std::norm(w[k]); }, n);
  const auto W = dft(std::span<const cplx>(w));
  const double df = 1.0 / (static_cast<double>(n) * g.dx);
  const double sf =
      moments([&](std::size_t k) { return detail::signed_bin(k, n) * df; }, [&](std::size_t k) { return std::norm(W[k]); }, n);
  return {sx, sf, sx * sf};
}

}  // namespace gcalc
