#pragma once

#include <complex>

namespace latline::lineshape {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
// Evaluated by a sinc-quadrature (trapezoidal) sum with residue correction in
// the bulk and by the Laplace continued fraction far from the origin; the real
// part is accurate to ~1e-13 relative across both regions.
std::complex<double> faddeeva_w(std::complex<double> z);

}  // namespace latline::lineshape
