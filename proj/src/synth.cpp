#include "cmfd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmfd/errors.hpp"
#include "cmfd/rng.hpp"

namespace cmfd {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

bool rect_in_bounds(const Rect& r, int w, int h) {
    return r.x >= 0 && r.y >= 0 && r.w >= 1 && r.h >= 1 && r.x + r.w <= w && r.y + r.h <= h;
}

int scaled_extent(int v, double percent) {
    return std::max(1, static_cast<int>(std::lround(v * percent / 100.0)));
}

} // namespace

const char* attack_name(AttackKind k) {
    switch (k) {
        case AttackKind::plain: return "plain";
        case AttackKind::gaussian_noise: return "noise";
        case AttackKind::jpeg_compress: return "jpeg";
        case AttackKind::scale: return "scale";
    }
    return "?";
}

double attack_level(const Attack& a) {
    switch (a.kind) {
        case AttackKind::plain: return 0.0;
        case AttackKind::gaussian_noise: return a.noise_sigma;
        case AttackKind::jpeg_compress: return static_cast<double>(a.jpeg_quality);
        case AttackKind::scale: return a.scale_percent;
    }
    return 0.0;
}

Rect ForgerySpec::pasted_rect() const {
    Rect r{target_x, target_y, source.w, source.h};
    if (attack.kind == AttackKind::scale) {
        r.w = scaled_extent(source.w, attack.scale_percent);
        r.h = scaled_extent(source.h, attack.scale_percent);
    }
    return r;
}

void ForgerySpec::validate(int image_width, int image_height) const {
    if (!rect_in_bounds(source, image_width, image_height))
        throw ValidationError("forgery spec: source rect out of bounds");
    if (!rect_in_bounds(pasted_rect(), image_width, image_height))
        throw ValidationError("forgery spec: pasted rect out of bounds");
    switch (attack.kind) {
        case AttackKind::gaussian_noise:
            if (attack.noise_sigma < 0.0) throw ValidationError("forgery spec: negative noise sigma");
            break;
        case AttackKind::jpeg_compress:
            if (attack.jpeg_quality < 20 || attack.jpeg_quality > 100)
                throw ValidationError("forgery spec: JPEG quality must be in [20,100]");
            break;
        case AttackKind::scale:
            if (attack.scale_percent < 40.0 || attack.scale_percent > 200.0)
                throw ValidationError("forgery spec: scale percent must be in [40,200]");
            break;
        case AttackKind::plain:
            break;
    }
}

GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1 || src.width < 1 || src.height < 1)
        throw DimensionError("resize_bilinear: empty image");
    GrayImage out(out_width, out_height);
    const double sx = static_cast<double>(src.width) / out_width;
    const double sy = static_cast<double>(src.height) / out_height;
    for (int y = 0; y < out_height; ++y) {
        const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
        const int y0 = static_cast<int>(v);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double fy = v - y0;
        for (int x = 0; x < out_width; ++x) {
            const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
            const int x0 = static_cast<int>(u);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double fx = u - x0;
            const double top = src.at(y0, x0) * (1.0 - fx) + src.at(y0, x1) * fx;
            const double bot = src.at(y1, x0) * (1.0 - fx) + src.at(y1, x1) * fx;
            out.at(y, x) = top * (1.0 - fy) + bot * fy;
        }
    }
    return out;
}

std::pair<GrayImage, GroundTruth> synthesize_forgery(const GrayImage& img, const ForgerySpec& spec,
                                                     std::uint64_t seed) {
    spec.validate(img.width, img.height);

    // lift the source patch
    GrayImage patch(spec.source.w, spec.source.h);
    for (int y = 0; y < spec.source.h; ++y)
        for (int x = 0; x < spec.source.w; ++x)
            patch.at(y, x) = img.at(spec.source.y + y, spec.source.x + x);

    const Rect pasted = spec.pasted_rect();
    if (spec.attack.kind == AttackKind::scale)
        patch = resize_bilinear(patch, pasted.w, pasted.h);

    GrayImage forged = img;
    Rng rng(seed);
    for (int y = 0; y < pasted.h; ++y) {
        for (int x = 0; x < pasted.w; ++x) {
            double v = patch.at(y, x);
            if (spec.attack.kind == AttackKind::gaussian_noise && spec.attack.noise_sigma > 0.0)
                v = clamp01(v + rng.normal(0.0, spec.attack.noise_sigma));
            forged.at(pasted.y + y, pasted.x + x) = v;
        }
    }

    if (spec.attack.kind == AttackKind::jpeg_compress)
        forged = jpeg_roundtrip(forged, spec.attack.jpeg_quality);

    GroundTruth gt;
    gt.mask = Mask(img.width, img.height);
    for (int y = 0; y < spec.source.h; ++y)
        for (int x = 0; x < spec.source.w; ++x) gt.mask.at(spec.source.y + y, spec.source.x + x) = 1;
    for (int y = 0; y < pasted.h; ++y)
        for (int x = 0; x < pasted.w; ++x) gt.mask.at(pasted.y + y, pasted.x + x) = 1;
    gt.shift_dx = spec.target_x - spec.source.x;
    gt.shift_dy = spec.target_y - spec.source.y;
    return {std::move(forged), std::move(gt)};
}

} // namespace cmfd
