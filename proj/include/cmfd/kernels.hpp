#pragma once

#include <cstddef>
#include <string_view>

namespace cmfd::kernels {

// Dense double-precision inner loops shared by the wavelet, SVD and matching
// stages. Every entry has a scalar reference implementation and, on x86 with
// AVX2+FMA, a vectorized variant; the active table is resolved once per
// process. Backends may differ in the last bits (summation order), so
// cross-backend checks are tolerance-based.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    // In-place plane rotation: x <- c*x - s*y, y <- s*x + c*y.
    void (*rotate_pair)(double* x, double* y, double c, double s, std::size_t n);
    // Orthonormal Haar butterfly over `pairs` adjacent sample pairs:
    // lo[k] = (in[2k] + in[2k+1])/sqrt2, hi[k] = (in[2k] - in[2k+1])/sqrt2.
    void (*haar_split)(const double* in, double* lo, double* hi, std::size_t pairs);
    void (*haar_merge)(const double* lo, const double* hi, double* out, std::size_t pairs);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

// Active table. Selection order: CMFD_KERNELS env var (scalar|avx2|auto),
// then CPU support. Requesting avx2 on a CPU without it falls back to scalar
// with a warning.
const Ops& ops();

std::string_view active_backend();

const Ops& scalar_ops();

// Null when the binary or CPU lacks AVX2+FMA.
const Ops* avx2_ops_if_supported();

bool cpu_has_avx2();

} // namespace cmfd::kernels
