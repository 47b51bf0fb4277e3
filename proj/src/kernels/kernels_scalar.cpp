#include "cmfd/kernels.hpp"

#include <cmath>

namespace cmfd::kernels {
namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

void haar_split(const double* in, double* lo, double* hi, std::size_t pairs) {
    for (std::size_t k = 0; k < pairs; ++k) {
        const double a = in[2 * k];
        const double b = in[2 * k + 1];
        lo[k] = (a + b) * inv_sqrt2;
        hi[k] = (a - b) * inv_sqrt2;
    }
}

void haar_merge(const double* lo, const double* hi, double* out, std::size_t pairs) {
    for (std::size_t k = 0; k < pairs; ++k) {
        out[2 * k] = (lo[k] + hi[k]) * inv_sqrt2;
        out[2 * k + 1] = (lo[k] - hi[k]) * inv_sqrt2;
    }
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace scalar

const Ops& scalar_ops() {
    static const Ops table{
        scalar::dot, scalar::sq_dist, scalar::rotate_pair,
        scalar::haar_split, scalar::haar_merge, scalar::mul,
    };
    return table;
}

} // namespace cmfd::kernels
