#pragma once

// Independent reference implementations used only by tests. Each deliberately
// takes a different route than the library: singular values via eigenvalues
// of A^T A (two-sided Jacobi on the Gram matrix, not one-sided on A), block
// matching via the exhaustive all-pairs scan, tail behavior via the Hill
// estimator.

#include <vector>

#include "cmfd/blocks.hpp"
#include "cmfd/image.hpp"
#include "cmfd/matching.hpp"
#include "cmfd/rng.hpp"

namespace oracles {

// Eigenvalues of a symmetric n x n matrix (row-major), descending.
std::vector<double> symmetric_eigenvalues(std::vector<double> mat, int n);

// Singular values of a square matrix via sqrt(eig(A^T A)), descending.
std::vector<double> singular_values_via_gram(const std::vector<double>& colmajor, int n);

// Every i<j block pair with S >= T and origin distance > D.
cmfd::MatchSet all_pairs_matches(const cmfd::BlockGrid& grid, const cmfd::DetectionParams& params);

// Hill estimate of the survival-function tail index of |samples|, using the
// top `k` order statistics. The power-law density exponent is this plus one.
double hill_tail_index(std::vector<double> samples, std::size_t k);

double quantile(std::vector<double> samples, double q);

// Uniform [0,1) random image, used across the property suites.
cmfd::GrayImage random_image(int width, int height, cmfd::Rng& rng);

} // namespace oracles
