#include "cmfd/svd.hpp"

#include <algorithm>
#include <cmath>

#include "cmfd/errors.hpp"
#include "cmfd/kernels.hpp"

namespace cmfd {

namespace {
constexpr double kOrthoTol = 1e-15; // relative off-diagonal threshold
constexpr double kZeroNorm = 1e-280; // columns this small are exactly-null for pivoting
constexpr int kMaxSweeps = 60;
} // namespace

void singular_values_inplace(double* a, int n, double* sv) {
    if (n <= 0 || n > 64) throw DimensionError("singular_values: n out of range");
    const auto& k = kernels::ops();
    const std::size_t nn = static_cast<std::size_t>(n);

    // squared column norms, refreshed each sweep to cancel update drift
    double norm2[64];
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (int j = 0; j < n; ++j) norm2[j] = k.dot(a + j * nn, a + j * nn, nn);
        converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (norm2[p] <= kZeroNorm || norm2[q] <= kZeroNorm) continue;
                double* cp = a + p * nn;
                double* cq = a + q * nn;
                const double apq = k.dot(cp, cq, nn);
                if (apq * apq <= kOrthoTol * kOrthoTol * norm2[p] * norm2[q]) continue;
                converged = false;
                const double tau = (norm2[q] - norm2[p]) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                k.rotate_pair(cp, cq, c, s, nn);
                const double app = norm2[p];
                const double aqq = norm2[q];
                // cancellation can push an annihilated column a hair negative
                norm2[p] = std::max(c * c * app - 2.0 * c * s * apq + s * s * aqq, 0.0);
                norm2[q] = std::max(s * s * app + 2.0 * c * s * apq + c * c * aqq, 0.0);
            }
        }
    }
    if (!converged) throw NumericError("singular_values: Jacobi sweeps did not converge");

    for (int j = 0; j < n; ++j) sv[j] = std::sqrt(k.dot(a + j * nn, a + j * nn, nn));
    std::sort(sv, sv + n, std::greater<double>());
}

std::vector<double> singular_values(const std::vector<double>& colmajor, int n) {
    if (n <= 0 || colmajor.size() != static_cast<std::size_t>(n) * n)
        throw DimensionError("singular_values: matrix must be square n x n");
    if (n > 64) throw DimensionError("singular_values: n exceeds the small-matrix limit");
    std::vector<double> work = colmajor;
    std::vector<double> sv(n);
    singular_values_inplace(work.data(), n, sv.data());
    return sv;
}

} // namespace cmfd
