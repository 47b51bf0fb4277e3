#pragma once

#include <cstdint>

#include "cmfd/image.hpp"

namespace cmfd {

struct Rect {
    int x = 0; // column of the left edge
    int y = 0; // row of the top edge
    int w = 0;
    int h = 0;
};

enum class AttackKind { plain, gaussian_noise, jpeg_compress, scale };

struct Attack {
    AttackKind kind = AttackKind::plain;
    double noise_sigma = 0.0;     // gaussian_noise: std-dev in intensity units
    int jpeg_quality = 100;       // jpeg_compress: 20..100
    double scale_percent = 100.0; // scale: 40..200

    static Attack plain() { return {}; }
    static Attack gaussian(double sigma) { return {AttackKind::gaussian_noise, sigma, 100, 100.0}; }
    static Attack jpeg(int quality) { return {AttackKind::jpeg_compress, 0.0, quality, 100.0}; }
    static Attack rescale(double percent) { return {AttackKind::scale, 0.0, 100, percent}; }
};

const char* attack_name(AttackKind k);
double attack_level(const Attack& a);

struct ForgerySpec {
    Rect source;
    int target_x = 0; // top-left corner the patch is pasted at
    int target_y = 0;
    Attack attack;

    void validate(int image_width, int image_height) const; // throws ValidationError
    Rect pasted_rect() const; // target rect after any rescale
};

struct GroundTruth {
    Mask mask; // 1 on both the source and the pasted region
    int shift_dx = 0;
    int shift_dy = 0;
};

// Copies the source patch, applies the attack, pastes at the target origin.
// Noise is zero-mean Gaussian over the pasted region only, clamped back to
// [0,1]; JPEG re-encodes the whole forged image; scaling resizes the patch
// bilinearly before pasting. Deterministic in (img, spec, seed).
std::pair<GrayImage, GroundTruth> synthesize_forgery(const GrayImage& img, const ForgerySpec& spec,
                                                     std::uint64_t seed);

// Bilinear patch resize, exposed for the scale attack and its tests.
GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height);

} // namespace cmfd
