#pragma once

#include "cmfd/image.hpp"

namespace cmfd {

// One level of the separable orthonormal Haar decomposition. Band naming:
// first letter is the horizontal (row-direction) filter, second the vertical.
// All four bands are ceil(W/2) x ceil(H/2).
struct WaveletPyramid {
    GrayImage ll, lh, hl, hh;
    int levels = 1;
    int src_width = 0;  // original dimensions, needed to invert odd sizes
    int src_height = 0;
};

// Rows-then-columns orthonormal Haar with stride 2. An odd trailing sample
// passes through to the low band unscaled (a 1x1 identity block), which keeps
// the whole transform orthonormal: energy is preserved exactly and the
// matching high-band tail entry is always zero.
WaveletPyramid dwt2_haar(const GrayImage& img);

GrayImage idwt2_haar(const WaveletPyramid& pyr);

// Repeated decomposition of the ll band; returns the final coarse band.
GrayImage coarse_band(const GrayImage& img, int levels);

} // namespace cmfd
