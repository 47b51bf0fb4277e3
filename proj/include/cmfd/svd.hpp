#pragma once

#include <vector>

namespace cmfd {

// Singular values of a square n x n matrix by one-sided (Hestenes) Jacobi:
// column pairs are rotated until mutually orthogonal, the column norms are
// the singular values. `colmajor` is modified in place; the result is written
// descending into `sv` (length n). Cyclic pivot order, no randomization, so
// identical input bits give identical output bits.
// Throws NumericError if the sweep limit is hit.
void singular_values_inplace(double* colmajor, int n, double* sv);

std::vector<double> singular_values(const std::vector<double>& colmajor, int n);

} // namespace cmfd
