#include "cmfd/wavelet.hpp"

#include <vector>

#include "cmfd/errors.hpp"
#include "cmfd/kernels.hpp"

namespace cmfd {

namespace {

// 1-D forward split of `n` samples into ceil(n/2) low + high coefficients.
void split_line(const double* in, double* lo, double* hi, int n) {
    const auto& k = kernels::ops();
    const int pairs = n / 2;
    k.haar_split(in, lo, hi, static_cast<std::size_t>(pairs));
    if (n & 1) {
        lo[pairs] = in[n - 1]; // orthonormal passthrough of the odd tail
        hi[pairs] = 0.0;
    }
}

void merge_line(const double* lo, const double* hi, double* out, int n) {
    const auto& k = kernels::ops();
    const int pairs = n / 2;
    k.haar_merge(lo, hi, out, static_cast<std::size_t>(pairs));
    if (n & 1) out[n - 1] = lo[pairs];
}

int half_up(int n) { return (n + 1) / 2; }

} // namespace

WaveletPyramid dwt2_haar(const GrayImage& img) {
    if (img.width < 2 || img.height < 2)
        throw DimensionError("dwt2_haar: image must be at least 2x2");

    const int w = img.width;
    const int h = img.height;
    const int hw = half_up(w);
    const int hh2 = half_up(h);

    // row pass
    GrayImage low(hw, h), high(hw, h);
    for (int r = 0; r < h; ++r)
        split_line(&img.pix[static_cast<std::size_t>(r) * w], &low.pix[static_cast<std::size_t>(r) * hw],
                   &high.pix[static_cast<std::size_t>(r) * hw], w);

    // column pass
    WaveletPyramid pyr;
    pyr.src_width = w;
    pyr.src_height = h;
    pyr.ll = GrayImage(hw, hh2);
    pyr.lh = GrayImage(hw, hh2);
    pyr.hl = GrayImage(hw, hh2);
    pyr.hh = GrayImage(hw, hh2);

    std::vector<double> col(h), clo(hh2), chi(hh2);
    for (int c = 0; c < hw; ++c) {
        for (int r = 0; r < h; ++r) col[r] = low.at(r, c);
        split_line(col.data(), clo.data(), chi.data(), h);
        for (int r = 0; r < hh2; ++r) {
            pyr.ll.at(r, c) = clo[r];
            pyr.hl.at(r, c) = chi[r];
        }
        for (int r = 0; r < h; ++r) col[r] = high.at(r, c);
        split_line(col.data(), clo.data(), chi.data(), h);
        for (int r = 0; r < hh2; ++r) {
            pyr.lh.at(r, c) = clo[r];
            pyr.hh.at(r, c) = chi[r];
        }
    }
    return pyr;
}

GrayImage idwt2_haar(const WaveletPyramid& pyr) {
    const int w = pyr.src_width;
    const int h = pyr.src_height;
    const int hw = half_up(w);
    const int hh2 = half_up(h);
    const bool consistent = pyr.ll.width == hw && pyr.ll.height == hh2 && pyr.ll.same_shape(pyr.lh) &&
                            pyr.ll.same_shape(pyr.hl) && pyr.ll.same_shape(pyr.hh);
    if (!consistent || w < 2 || h < 2)
        throw DimensionError("idwt2_haar: inconsistent sub-band shapes");

    // invert the column pass
    GrayImage low(hw, h), high(hw, h);
    std::vector<double> col(h), clo(hh2), chi(hh2);
    for (int c = 0; c < hw; ++c) {
        for (int r = 0; r < hh2; ++r) {
            clo[r] = pyr.ll.at(r, c);
            chi[r] = pyr.hl.at(r, c);
        }
        merge_line(clo.data(), chi.data(), col.data(), h);
        for (int r = 0; r < h; ++r) low.at(r, c) = col[r];

        for (int r = 0; r < hh2; ++r) {
            clo[r] = pyr.lh.at(r, c);
            chi[r] = pyr.hh.at(r, c);
        }
        merge_line(clo.data(), chi.data(), col.data(), h);
        for (int r = 0; r < h; ++r) high.at(r, c) = col[r];
    }

    // invert the row pass
    GrayImage out(w, h);
    for (int r = 0; r < h; ++r)
        merge_line(&low.pix[static_cast<std::size_t>(r) * hw], &high.pix[static_cast<std::size_t>(r) * hw],
                   &out.pix[static_cast<std::size_t>(r) * w], w);
    return out;
}

GrayImage coarse_band(const GrayImage& img, int levels) {
    if (levels < 1) throw ParameterError("coarse_band: levels must be >= 1");
    GrayImage band = dwt2_haar(img).ll;
    for (int l = 1; l < levels; ++l) band = dwt2_haar(band).ll;
    return band;
}

} // namespace cmfd
