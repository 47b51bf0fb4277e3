// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be reached through the runtime dispatch in kernels.cpp.

#include "cmfd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace cmfd::kernels {
namespace avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

constexpr double inv_sqrt2 = 0.70710678118654752440;

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d yi = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, xi, _mm256_mul_pd(vs, yi)));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, xi, _mm256_mul_pd(vc, yi)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void haar_split(const double* in, double* lo, double* hi, std::size_t pairs) {
    const __m256d f = _mm256_set1_pd(inv_sqrt2);
    std::size_t k = 0;
    for (; k + 4 <= pairs; k += 4) {
        const __m256d a = _mm256_loadu_pd(in + 2 * k);
        const __m256d b = _mm256_loadu_pd(in + 2 * k + 4);
        const __m256d t0 = _mm256_permute2f128_pd(a, b, 0x20);
        const __m256d t1 = _mm256_permute2f128_pd(a, b, 0x31);
        const __m256d even = _mm256_unpacklo_pd(t0, t1);
        const __m256d odd = _mm256_unpackhi_pd(t0, t1);
        _mm256_storeu_pd(lo + k, _mm256_mul_pd(_mm256_add_pd(even, odd), f));
        _mm256_storeu_pd(hi + k, _mm256_mul_pd(_mm256_sub_pd(even, odd), f));
    }
    for (; k < pairs; ++k) {
        const double a = in[2 * k];
        const double b = in[2 * k + 1];
        lo[k] = (a + b) * inv_sqrt2;
        hi[k] = (a - b) * inv_sqrt2;
    }
}

void haar_merge(const double* lo, const double* hi, double* out, std::size_t pairs) {
    const __m256d f = _mm256_set1_pd(inv_sqrt2);
    std::size_t k = 0;
    for (; k + 4 <= pairs; k += 4) {
        const __m256d l = _mm256_loadu_pd(lo + k);
        const __m256d h = _mm256_loadu_pd(hi + k);
        const __m256d even = _mm256_mul_pd(_mm256_add_pd(l, h), f);
        const __m256d odd = _mm256_mul_pd(_mm256_sub_pd(l, h), f);
        const __m256d u0 = _mm256_unpacklo_pd(even, odd);
        const __m256d u1 = _mm256_unpackhi_pd(even, odd);
        _mm256_storeu_pd(out + 2 * k, _mm256_permute2f128_pd(u0, u1, 0x20));
        _mm256_storeu_pd(out + 2 * k + 4, _mm256_permute2f128_pd(u0, u1, 0x31));
    }
    for (; k < pairs; ++k) {
        out[2 * k] = (lo[k] + hi[k]) * inv_sqrt2;
        out[2 * k + 1] = (lo[k] - hi[k]) * inv_sqrt2;
    }
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace avx2

const Ops& avx2_ops_table() {
    static const Ops table{
        avx2::dot, avx2::sq_dist, avx2::rotate_pair,
        avx2::haar_split, avx2::haar_merge, avx2::mul,
    };
    return table;
}

} // namespace cmfd::kernels

#endif // x86_64
