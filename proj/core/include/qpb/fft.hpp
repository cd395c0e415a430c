#pragma once

#include <complex>

#include "qpb/grid2d.hpp"

namespace qpb {

using CGrid = Grid2D<std::complex<double>>;

// Unnormalized 2-D DFTs (FFTW sign conventions). Plans are cached per shape;
// execution is thread-safe.
void fft2_forward(CGrid& a);
void fft2_inverse(CGrid& a);  // no 1/N scaling

// Spatial frequency (cycles per unit length) of DFT bin i for n samples at spacing d.
double fft_frequency(int i, int n, double d);

}  // namespace qpb
