#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cmfd/image.hpp"
#include "cmfd/rng.hpp"

namespace cmfd {

namespace {

// bilinear value noise on a coarse random lattice; aperiodic mid-scale detail
struct ValueNoise {
    int cell;
    int nx, ny;
    std::vector<double> lattice;

    ValueNoise(int width, int height, int cell_size, Rng& rng) : cell(cell_size) {
        nx = width / cell + 2;
        ny = height / cell + 2;
        lattice.resize(static_cast<std::size_t>(nx) * ny);
        for (auto& v : lattice) v = rng.uniform(-1.0, 1.0);
    }

    double at(double x, double y) const {
        const double gx = x / cell;
        const double gy = y / cell;
        const int x0 = static_cast<int>(gx);
        const int y0 = static_cast<int>(gy);
        const double fx = gx - x0;
        const double fy = gy - y0;
        auto l = [this](int ix, int iy) { return lattice[static_cast<std::size_t>(iy) * nx + ix]; };
        const double top = l(x0, y0) * (1.0 - fx) + l(x0 + 1, y0) * fx;
        const double bot = l(x0, y0 + 1) * (1.0 - fx) + l(x0 + 1, y0 + 1) * fx;
        return top * (1.0 - fy) + bot * fy;
    }
};

} // namespace

// Layered aperiodic texture: low-frequency gratings and blobs for macro
// structure, three value-noise octaves for the mid scales, a whisper of
// pixel grain. The mid-scale octaves carry most of the local energy so block
// signatures ride on structured content rather than on pixel grain, which is
// the first casualty of noise or compression — the photographic regime the
// detector targets.
GrayImage make_texture(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    GrayImage img(width, height, 0.0);
    const double tau = 2.0 * std::numbers::pi;
    const double span = static_cast<double>(std::max(width, height));

    struct Grating {
        double kx, ky, phase, amp;
    };
    Grating gr[6];
    for (int i = 0; i < 6; ++i) {
        // first four are macro waves, last two mid-frequency
        const double freq = i < 4 ? rng.uniform(2.5, 11.0) : rng.uniform(14.0, 30.0);
        const double theta = rng.uniform(0.0, tau);
        gr[i].kx = tau * freq * std::cos(theta) / span;
        gr[i].ky = tau * freq * std::sin(theta) / span;
        gr[i].phase = rng.uniform(0.0, tau);
        gr[i].amp = i < 4 ? rng.uniform(0.05, 0.12) : rng.uniform(0.03, 0.06);
    }

    struct Blob {
        double cx, cy, inv2s2, amp;
    };
    Blob blobs[3];
    for (auto& b : blobs) {
        b.cx = rng.uniform(0.0, width);
        b.cy = rng.uniform(0.0, height);
        const double s = rng.uniform(span / 12.0, span / 5.0);
        b.inv2s2 = 1.0 / (2.0 * s * s);
        b.amp = rng.uniform(0.08, 0.20) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    }

    const ValueNoise octave23(width, height, 23, rng);
    const ValueNoise octave11(width, height, 11, rng);
    const ValueNoise octave5(width, height, 5, rng);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.5;
            for (const auto& g : gr) v += g.amp * std::cos(g.kx * x + g.ky * y + g.phase);
            for (const auto& b : blobs) {
                const double dx = x - b.cx;
                const double dy = y - b.cy;
                v += b.amp * std::exp(-(dx * dx + dy * dy) * b.inv2s2);
            }
            v += 0.12 * octave23.at(x, y);
            v += 0.20 * octave11.at(x, y);
            v += 0.22 * octave5.at(x, y);
            img.at(y, x) = v;
        }
    }

    // pixel-scale grain so even flat patches stay unique
    for (auto& p : img.pix) p += rng.uniform(-0.02, 0.02);

    const auto [lo_it, hi_it] = std::minmax_element(img.pix.begin(), img.pix.end());
    const double lo = *lo_it, hi = *hi_it;
    const double scale = hi > lo ? (0.94 - 0.06) / (hi - lo) : 0.0;
    for (auto& p : img.pix) p = 0.06 + (p - lo) * scale;
    return img;
}

} // namespace cmfd
