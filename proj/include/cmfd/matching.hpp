#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cmfd/blocks.hpp"
#include "cmfd/image.hpp"

namespace cmfd {

// The tunable triple the optimizer searches over.
struct DetectionParams {
    int block_size = 8;        // R
    double min_distance = 16;  // D, coarse-band pixels
    double threshold = 0.5;    // T, minimum similarity

    static constexpr double lower[3] = {4.0, 10.0, 0.001};
    static constexpr double upper[3] = {20.0, 40.0, 0.9};

    void validate() const; // throws ParameterError outside the box
};

struct MatchPair {
    int row_i = 0, col_i = 0; // lexicographically first origin
    int row_j = 0, col_j = 0;
    double similarity = 0.0;
    int shift_dr = 0, shift_dc = 0; // origin_j - origin_i
    bool verified = false;
};

struct MatchSet {
    std::vector<MatchPair> pairs;

    std::size_t verified_count() const;
};

// Knobs the optimizer does not search; defaults follow the detection recipe.
struct MatchConfig {
    int window = 16;       // sorted neighbors examined per block
    int quorum = 12;       // neighbor passes required out of 16 offsets
    std::vector<std::pair<int, int>> offsets = default_offsets();

    // 16 row/col offsets spanning a 4-pixel radius on both axes.
    static std::vector<std::pair<int, int>> default_offsets();
};

struct DuplicateMap {
    Mask q;        // coarse-band sized, 1 on duplicated block footprints
    Mask mask;     // q replicated up to image size
    GrayImage map; // mask * original intensities
};

// S = 1/(1 + Euclidean distance); 1 for identical features.
double similarity(std::span<const double> a, std::span<const double> b);

// Candidate pairs from the lexicographic order: each block is compared with
// its next `window` sorted neighbors; a pair is kept when S >= T and the
// origin distance exceeds D. Pairs come back canonically sorted.
MatchSet find_matches(const BlockGrid& grid, const DetectionParams& params,
                      const MatchConfig& cfg = {});

// Marks a pair verified when enough offset-shifted copies of it also match.
// Offsets leaving the grid for either block are skipped and the quorum is
// prorated (rounded up) over the valid ones. Pairs touching an unstable
// (texture-free) block never verify.
MatchSet verify_neighborhoods(const MatchSet& matches, const BlockGrid& grid,
                              const DetectionParams& params, const MatchConfig& cfg = {});

// Writes both R x R footprints of every verified pair into Q, replicates Q up
// by `upsample` to image size and multiplies with the original intensities.
DuplicateMap build_map(const MatchSet& matches, int band_rows, int band_cols,
                       const GrayImage& original, int block_size, int upsample);

// Precomputed window-scan state for one grid: everything about a candidate
// pair that does not depend on (D, T). The verification decision for any T
// reduces to one stored threshold per pair: the need-th smallest neighbor
// distance (filled lazily). Lets the optimizer re-evaluate thousands of
// (D, T) points against 3 comparisons per pair, with results identical to
// the staged find_matches + verify_neighborhoods route.
struct MatchCache {
    MatchConfig config; // snapshot; reuse requires an equal config
    std::vector<std::int32_t> block_a, block_b; // canonical pair, block indices
    std::vector<double> rho2;                   // squared feature distance
    std::vector<double> odist2;                 // squared origin distance
    std::vector<std::int16_t> shift_dr, shift_dc;
    std::vector<std::int8_t> valid;  // in-grid verification offsets
    std::vector<double> neighbor_rho2; // need-th smallest neighbor distance^2; NaN = unfilled

    std::size_t size() const { return rho2.size(); }
};

MatchCache build_match_cache(const BlockGrid& grid, const MatchConfig& cfg = {});


} // namespace cmfd
