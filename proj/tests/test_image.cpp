#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cmfd/errors.hpp"
#include "cmfd/image.hpp"
#include "cmfd/rng.hpp"
#include "support/oracles.hpp"

using namespace cmfd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "cmfd_image_tests";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("luma weights match the BT.601 definition") {
    CHECK(luma(1.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(luma(0.0, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(luma(1.0, 0.0, 0.0) == doctest::Approx(0.299));
    CHECK(luma(0.0, 1.0, 0.0) == doctest::Approx(0.587));
    CHECK(luma(0.0, 0.0, 1.0) == doctest::Approx(0.114));
}

TEST_CASE("16-bit PGM round trip preserves intensities to 1/65535") {
    Rng rng(11);
    const GrayImage img = oracles::random_image(37, 23, rng);
    const fs::path path = temp_dir() / "roundtrip.pgm";
    save_pgm16(img, path);
    const GrayImage back = load_grayscale(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
        max_err = std::max(max_err, std::abs(back.pix[i] - img.pix[i]));
    CHECK(max_err <= 1.0 / 65535.0 + 1e-12);
}

TEST_CASE("PNG round trip and RGB luma conversion") {
    Rng rng(12);
    const GrayImage img = oracles::random_image(16, 16, rng);
    const fs::path path = temp_dir() / "roundtrip.png";
    save_image(img, path);
    const GrayImage back = load_grayscale(path);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(back.pix[i] - img.pix[i]) <= 1.0 / 65535.0 + 1e-12);

    // a solid-red overlay gives a pure-red PNG region to exercise the
    // RGB-to-gray path (tinted at alpha 1 over black)
    GrayImage black(8, 8, 0.0);
    Mask all(8, 8, 1);
    const fs::path red = temp_dir() / "red.png";
    save_overlay_png(black, all, red, 1.0);
    const GrayImage gray = load_grayscale(red);
    for (double v : gray.pix) CHECK(v == doctest::Approx(0.299).epsilon(0.01));
}

TEST_CASE("missing and malformed files raise the right errors") {
    CHECK_THROWS_AS(load_grayscale(temp_dir() / "nope.png"), IoError);
    const fs::path junk = temp_dir() / "junk.bin";
    std::ofstream(junk) << "this is not an image at all";
    CHECK_THROWS_AS(load_grayscale(junk), FormatError);
}

TEST_CASE("jpeg round trip stays close at high quality") {
    const GrayImage img = make_texture(64, 64, 5);
    const GrayImage rt = jpeg_roundtrip(img, 95);
    REQUIRE(rt.same_shape(img));
    double mean_err = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) mean_err += std::abs(rt.pix[i] - img.pix[i]);
    mean_err /= static_cast<double>(img.size());
    CHECK(mean_err < 0.02);
    CHECK_THROWS_AS(jpeg_roundtrip(img, 0), ParameterError);

    // deterministic codec: same input, same bytes out
    const GrayImage rt2 = jpeg_roundtrip(img, 95);
    CHECK(rt2.pix == rt.pix);
}

TEST_CASE("textures are deterministic, in range, and seed-sensitive") {
    const GrayImage a = make_texture(64, 48, 42);
    const GrayImage b = make_texture(64, 48, 42);
    const GrayImage c = make_texture(64, 48, 43);
    CHECK(a.pix == b.pix);
    CHECK(a.pix != c.pix);
    for (double v : a.pix) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("mask iou") {
    Mask a(4, 4), b(4, 4);
    CHECK(mask_iou(a, b) == doctest::Approx(1.0)); // both empty
    a.at(0, 0) = 1;
    a.at(0, 1) = 1;
    b.at(0, 1) = 1;
    b.at(0, 2) = 1;
    CHECK(mask_iou(a, b) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(mask_iou(a, Mask(3, 3)), DimensionError);
}

TEST_CASE("mask png round trip") {
    Mask m(9, 7);
    m.at(2, 3) = 1;
    m.at(6, 8) = 1;
    const fs::path path = temp_dir() / "mask.png";
    save_mask_png(m, path);
    const Mask back = load_mask_png(path);
    REQUIRE(back.width == m.width);
    REQUIRE(back.height == m.height);
    CHECK(back.bits == m.bits);
}
