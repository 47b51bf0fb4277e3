#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cmfd {

// Row-major grayscale raster. Loaders normalize intensities to [0,1];
// wavelet sub-bands reuse the type with values outside that range.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pix;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pix(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int row, int col) { return pix[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return pix[static_cast<std::size_t>(row) * width + col]; }

    std::size_t size() const { return pix.size(); }
    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

// Binary mask with the same layout conventions as GrayImage.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int row, int col) { return bits[static_cast<std::size_t>(row) * width + col]; }
    std::uint8_t at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col]; }

    std::size_t count() const;
};

// ITU-R BT.601 luma weights used for every RGB-to-gray conversion.
inline double luma(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

// Decodes PNG, JPEG, or PGM (P5, 8/16-bit) by file signature and returns the
// normalized grayscale image. Throws IoError / FormatError.
GrayImage load_grayscale(const std::filesystem::path& path);

// Format chosen by extension: .pgm (16-bit P5), .png (16-bit gray), .jpg/.jpeg.
void save_image(const GrayImage& img, const std::filesystem::path& path);

void save_pgm16(const GrayImage& img, const std::filesystem::path& path);
GrayImage load_pgm(const std::filesystem::path& path);

void save_mask_png(const Mask& mask, const std::filesystem::path& path);
Mask load_mask_png(const std::filesystem::path& path);

// Grayscale base with detected pixels tinted red at the given alpha.
void save_overlay_png(const GrayImage& base, const Mask& detections,
                      const std::filesystem::path& path, double alpha = 0.5);

// In-memory JPEG round trip at the given quality (20..100); the image is
// quantized to 8 bits by the codec. Used by the compression attack.
GrayImage jpeg_roundtrip(const GrayImage& img, int quality);

double mask_iou(const Mask& a, const Mask& b);

// Deterministic synthetic test image: a few oriented gratings, soft blobs and
// broadband grain, normalized away from the [0,1] rails. Aperiodic by
// construction so authentic images carry no self-similar regions.
GrayImage make_texture(int width, int height, std::uint64_t seed);

} // namespace cmfd
