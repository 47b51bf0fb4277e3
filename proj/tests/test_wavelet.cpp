#include <doctest.h>

#include <cmath>

#include "cmfd/errors.hpp"
#include "cmfd/rng.hpp"
#include "cmfd/wavelet.hpp"
#include "support/oracles.hpp"

using namespace cmfd;

namespace {

double energy(const GrayImage& img) {
    double e = 0.0;
    for (double v : img.pix) e += v * v;
    return e;
}

double band_energy(const WaveletPyramid& p) {
    return energy(p.ll) + energy(p.lh) + energy(p.hl) + energy(p.hh);
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pix[i] - b.pix[i]));
    return m;
}

} // namespace

TEST_CASE("constant image: ll is 2c, detail bands vanish") {
    const double c = 0.37;
    const GrayImage img(16, 12, c);
    const WaveletPyramid pyr = dwt2_haar(img);
    REQUIRE(pyr.ll.width == 8);
    REQUIRE(pyr.ll.height == 6);
    for (double v : pyr.ll.pix) CHECK(v == doctest::Approx(2.0 * c));
    for (double v : pyr.lh.pix) CHECK(v == doctest::Approx(0.0));
    for (double v : pyr.hl.pix) CHECK(v == doctest::Approx(0.0));
    for (double v : pyr.hh.pix) CHECK(v == doctest::Approx(0.0));

    const GrayImage back = idwt2_haar(pyr);
    CHECK(max_abs_diff(back, img) < 1e-12);
}

TEST_CASE("2x2 block ll equals (a+b+c+d)/2") {
    GrayImage img(2, 2);
    img.at(0, 0) = 0.1; // a
    img.at(0, 1) = 0.7; // b
    img.at(1, 0) = 0.3; // c
    img.at(1, 1) = 0.9; // d
    const WaveletPyramid pyr = dwt2_haar(img);
    CHECK(pyr.ll.at(0, 0) == doctest::Approx((0.1 + 0.7 + 0.3 + 0.9) / 2.0));
    CHECK(pyr.hh.at(0, 0) == doctest::Approx((0.1 - 0.7 - 0.3 + 0.9) / 2.0));
}

TEST_CASE("all-zero bands invert to the zero image") {
    WaveletPyramid pyr;
    pyr.src_width = 6;
    pyr.src_height = 4;
    pyr.ll = GrayImage(3, 2, 0.0);
    pyr.lh = GrayImage(3, 2, 0.0);
    pyr.hl = GrayImage(3, 2, 0.0);
    pyr.hh = GrayImage(3, 2, 0.0);
    const GrayImage img = idwt2_haar(pyr);
    for (double v : img.pix) CHECK(v == 0.0);

    pyr.ll = GrayImage(3, 2, 2.0 * 0.25); // uniform 2c inverts to constant c
    const GrayImage c = idwt2_haar(pyr);
    for (double v : c.pix) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("perfect reconstruction and energy preservation, odd and even sizes") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = 2 + static_cast<int>(rng.uniform(0.0, 39.0));
        const int h = 2 + static_cast<int>(rng.uniform(0.0, 39.0));
        const GrayImage img = oracles::random_image(w, h, rng);
        const WaveletPyramid pyr = dwt2_haar(img);

        REQUIRE(pyr.ll.width == (w + 1) / 2);
        REQUIRE(pyr.ll.height == (h + 1) / 2);
        REQUIRE(pyr.ll.same_shape(pyr.lh));
        REQUIRE(pyr.ll.same_shape(pyr.hl));
        REQUIRE(pyr.ll.same_shape(pyr.hh));

        CHECK(max_abs_diff(idwt2_haar(pyr), img) < 1e-9);

        const double e_img = energy(img);
        const double e_bands = band_energy(pyr);
        CHECK(std::abs(e_bands - e_img) <= 1e-6 * std::max(e_img, 1e-30));
    }
}

TEST_CASE("linearity of the forward transform") {
    Rng rng(102);
    const GrayImage x = oracles::random_image(17, 9, rng);
    const GrayImage y = oracles::random_image(17, 9, rng);
    const double a = 1.7, b = -0.4;
    GrayImage combo(17, 9);
    for (std::size_t i = 0; i < combo.size(); ++i) combo.pix[i] = a * x.pix[i] + b * y.pix[i];

    const WaveletPyramid px = dwt2_haar(x);
    const WaveletPyramid py = dwt2_haar(y);
    const WaveletPyramid pc = dwt2_haar(combo);
    for (std::size_t i = 0; i < pc.ll.size(); ++i) {
        CHECK(pc.ll.pix[i] == doctest::Approx(a * px.ll.pix[i] + b * py.ll.pix[i]).epsilon(1e-9));
        CHECK(pc.hh.pix[i] == doctest::Approx(a * px.hh.pix[i] + b * py.hh.pix[i]).epsilon(1e-9));
    }
}

TEST_CASE("degenerate sizes are rejected") {
    CHECK_THROWS_AS(dwt2_haar(GrayImage(1, 8)), DimensionError);
    CHECK_THROWS_AS(dwt2_haar(GrayImage(8, 1)), DimensionError);

    WaveletPyramid bad;
    bad.src_width = 6;
    bad.src_height = 4;
    bad.ll = GrayImage(3, 2);
    bad.lh = GrayImage(3, 2);
    bad.hl = GrayImage(2, 2); // mismatched
    bad.hh = GrayImage(3, 2);
    CHECK_THROWS_AS(idwt2_haar(bad), DimensionError);
}

TEST_CASE("multi-level coarse band halves repeatedly") {
    const GrayImage img = make_texture(64, 64, 3);
    CHECK(coarse_band(img, 1).width == 32);
    CHECK(coarse_band(img, 2).width == 16);
    CHECK_THROWS_AS(coarse_band(img, 0), ParameterError);
}
