#pragma once

#include <complex>

namespace gcalc {

using cplx = std::complex<double>;

namespace detail {
inline bool is_real(cplx z) { return z.imag() == 0.0; }
}  // namespace detail

}  // namespace gcalc
