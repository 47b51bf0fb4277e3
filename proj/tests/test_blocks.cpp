#include <doctest.h>

#include <cmath>

#include "cmfd/blocks.hpp"
#include "cmfd/errors.hpp"
#include "cmfd/rng.hpp"
#include "cmfd/svd.hpp"
#include "support/oracles.hpp"

using namespace cmfd;

TEST_CASE("tiling counts follow (M-R+1)(N-R+1)") {
    Rng rng(1);
    CHECK(tile_blocks(oracles::random_image(10, 10, rng), 4).count() == 49);
    CHECK(tile_blocks(oracles::random_image(4, 4, rng), 4).count() == 1);

    // enumeration oracle for the larger case
    const GrayImage band = oracles::random_image(64, 64, rng);
    int expected = 0;
    for (int r = 0; r + 8 <= 64; ++r)
        for (int c = 0; c + 8 <= 64; ++c) ++expected;
    CHECK(expected == 3249);
    CHECK(tile_blocks(band, 8).count() == expected);
}

TEST_CASE("tiling rejects out-of-range block sizes") {
    Rng rng(2);
    const GrayImage band = oracles::random_image(16, 16, rng);
    CHECK_THROWS_AS(tile_blocks(band, 3), ParameterError);
    CHECK_THROWS_AS(tile_blocks(band, 21), ParameterError);
    CHECK_THROWS_AS(tile_blocks(oracles::random_image(6, 6, rng), 8), ParameterError);
}

TEST_CASE("identity block: unit singular values, zero features") {
    GrayImage band(4, 4, 0.0);
    for (int i = 0; i < 4; ++i) band.at(i, i) = 1.0;
    BlockGrid grid = tile_blocks(band, 4);
    svd_features(grid);
    const BlockFeature f = grid.block_feature(0);
    for (int i = 0; i < 4; ++i) {
        CHECK(f.sv[i] == doctest::Approx(1.0));
        CHECK(f.feature[i] == doctest::Approx(0.0));
    }
    CHECK(f.svb == doctest::Approx(0.0));
}

TEST_CASE("rank-1 block has a single nonzero singular value") {
    const int r = 4;
    std::vector<double> u{0.5, 0.5, 0.5, 0.5};
    std::vector<double> v{0.5, -0.5, 0.5, -0.5}; // both unit norm
    GrayImage band(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) band.at(i, j) = u[i] * v[j];
    BlockGrid grid = tile_blocks(band, r);
    svd_features(grid);
    const BlockFeature f = grid.block_feature(0);
    CHECK(f.sv[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < r; ++i) CHECK(f.sv[i] < 1e-12);
}

TEST_CASE("singular values match the gram-matrix eigenvalue oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5;
        std::vector<double> m(n * n);
        for (auto& x : m) x = rng.uniform();
        const std::vector<double> sv = singular_values(m, n);
        const std::vector<double> expected = oracles::singular_values_via_gram(m, n);
        for (int i = 0; i < n; ++i) CHECK(std::abs(sv[i] - expected[i]) < 1e-8);
    }
}

TEST_CASE("frobenius identity and transpose invariance") {
    Rng rng(4);
    for (int r : {4, 7, 12, 20}) {
        std::vector<double> m(static_cast<std::size_t>(r) * r);
        for (auto& x : m) x = rng.uniform();

        const std::vector<double> sv = singular_values(m, r);
        double frob2 = 0.0;
        for (double x : m) frob2 += x * x;
        double sum_sv2 = 0.0;
        for (double s : sv) sum_sv2 += s * s;
        CHECK(std::abs(sum_sv2 - frob2) <= 1e-6 * frob2);

        std::vector<double> mt(m.size());
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                mt[static_cast<std::size_t>(j) * r + i] = m[static_cast<std::size_t>(i) * r + j];
        const std::vector<double> svt = singular_values(mt, r);
        for (int i = 0; i < r; ++i) CHECK(std::abs(sv[i] - svt[i]) < 1e-9);

        for (int i = 0; i + 1 < r; ++i) CHECK(sv[i] >= sv[i + 1]); // descending
        for (double s : sv) CHECK(s >= 0.0);
    }
}

TEST_CASE("identical blocks produce bit-identical features") {
    Rng rng(5);
    GrayImage band(24, 12);
    for (auto& p : band.pix) p = rng.uniform();
    // clone the left 12 columns to the right
    for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 12; ++c) band.at(r, c + 12) = band.at(r, c);

    BlockGrid grid = tile_blocks(band, 6);
    svd_features(grid);
    const int left = grid.index(2, 3);
    const int right = grid.index(2, 3 + 12);
    const double* fl = grid.feature_of(left);
    const double* fr = grid.feature_of(right);
    for (int i = 0; i < 6; ++i) CHECK(fl[i] == fr[i]);
}

TEST_CASE("flat blocks are floored, not infinite") {
    GrayImage band(8, 8, 0.0);
    BlockGrid grid = tile_blocks(band, 4);
    svd_features(grid, 1e-6);
    const BlockFeature f = grid.block_feature(0);
    const double lim = -std::log(1e-6);
    for (int i = 0; i < 4; ++i) CHECK(f.feature[i] == doctest::Approx(lim));
    CHECK(f.svb == doctest::Approx(4 * lim));
}

TEST_CASE("lexicographic order is deterministic and sorted") {
    Rng rng(6);
    const GrayImage band = oracles::random_image(20, 20, rng);
    BlockGrid a = tile_blocks(band, 5);
    svd_features(a);
    BlockGrid b = tile_blocks(band, 5);
    svd_features(b);
    CHECK(a.lex_order == b.lex_order);

    const std::size_t lane = 5;
    for (int i = 0; i + 1 < a.count(); ++i) {
        const double* fa = a.feat.data() + lane * a.lex_order[i];
        const double* fb = a.feat.data() + lane * a.lex_order[i + 1];
        bool le = true;
        for (std::size_t k = 0; k < lane; ++k) {
            if (fa[k] < fb[k]) break;
            if (fa[k] > fb[k]) {
                le = false;
                break;
            }
        }
        CHECK(le);
    }
}
