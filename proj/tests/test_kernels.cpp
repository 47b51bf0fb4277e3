#include <doctest.h>

#include <cmath>
#include <vector>

#include "cmfd/kernels.hpp"
#include "cmfd/rng.hpp"

using namespace cmfd;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("scalar kernels compute the expected values") {
    const auto& k = kernels::scalar_ops();
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{5, 4, 3, 2, 1};
    CHECK(k.dot(a.data(), b.data(), 5) == doctest::Approx(35.0));
    CHECK(k.sq_dist(a.data(), b.data(), 5) == doctest::Approx(16 + 4 + 0 + 4 + 16));

    std::vector<double> x{1, 0}, y{0, 1};
    k.rotate_pair(x.data(), y.data(), std::sqrt(0.5), std::sqrt(0.5), 2);
    CHECK(x[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(y[0] == doctest::Approx(std::sqrt(0.5)));

    const std::vector<double> line{1, 1, 2, 4};
    std::vector<double> lo(2), hi(2), back(4);
    k.haar_split(line.data(), lo.data(), hi.data(), 2);
    CHECK(lo[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(hi[0] == doctest::Approx(0.0));
    CHECK(lo[1] == doctest::Approx(6.0 / std::sqrt(2.0)));
    CHECK(hi[1] == doctest::Approx(-2.0 / std::sqrt(2.0)));
    k.haar_merge(lo.data(), hi.data(), back.data(), 2);
    for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(line[i]));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const kernels::Ops* simd = kernels::avx2_ops_if_supported();
    if (!simd) {
        MESSAGE("AVX2 not available; equivalence suite skipped");
        return;
    }
    const auto& ref = kernels::scalar_ops();
    Rng rng(77);

    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 16u, 20u, 63u, 128u, 1001u}) {
        auto a = random_vec(n, rng);
        auto b = random_vec(n, rng);

        CHECK(close_rel(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-12));
        CHECK(close_rel(simd->sq_dist(a.data(), b.data(), n), ref.sq_dist(a.data(), b.data(), n), 1e-12));

        auto x1 = a, y1 = b, x2 = a, y2 = b;
        simd->rotate_pair(x1.data(), y1.data(), 0.8, 0.6, n);
        ref.rotate_pair(x2.data(), y2.data(), 0.8, 0.6, n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close_rel(x1[i], x2[i], 1e-12));
            CHECK(close_rel(y1[i], y2[i], 1e-12));
        }

        std::vector<double> m1(n), m2(n);
        simd->mul(a.data(), b.data(), m1.data(), n);
        ref.mul(a.data(), b.data(), m2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(m1[i] == m2[i]);

        const std::size_t pairs = n / 2;
        if (pairs > 0) {
            std::vector<double> lo1(pairs), hi1(pairs), lo2(pairs), hi2(pairs);
            simd->haar_split(a.data(), lo1.data(), hi1.data(), pairs);
            ref.haar_split(a.data(), lo2.data(), hi2.data(), pairs);
            for (std::size_t i = 0; i < pairs; ++i) {
                CHECK(close_rel(lo1[i], lo2[i], 1e-13));
                CHECK(close_rel(hi1[i], hi2[i], 1e-13));
            }
            std::vector<double> out1(2 * pairs), out2(2 * pairs);
            simd->haar_merge(lo1.data(), hi1.data(), out1.data(), pairs);
            ref.haar_merge(lo2.data(), hi2.data(), out2.data(), pairs);
            for (std::size_t i = 0; i < 2 * pairs; ++i) CHECK(close_rel(out1[i], out2[i], 1e-12));
        }
    }
}

TEST_CASE("active backend reports a known name") {
    const auto name = kernels::active_backend();
    CHECK((name == "scalar" || name == "avx2"));
    // the dispatched table must be one of the two concrete ones
    const auto& active = kernels::ops();
    const bool is_scalar = active.dot == kernels::scalar_ops().dot;
    const kernels::Ops* simd = kernels::avx2_ops_if_supported();
    const bool is_simd = simd && active.dot == simd->dot;
    CHECK((is_scalar || is_simd));
}
