#pragma once

#include <vector>

#include "cmfd/image.hpp"

namespace cmfd {

// Per-block view materialized from the flat grid arrays.
struct BlockFeature {
    int row = 0; // origin in coarse-band pixels
    int col = 0;
    std::vector<double> sv;      // singular values, descending
    std::vector<double> feature; // ln(1/max(sv_i, floor)) per value
    double svb = 0.0;            // sum of feature entries
};

// Overlapping R x R tiling of a coarse band, stride 1, row-major origins.
// Feature data is stored flat (one contiguous lane per block) because the
// matching stage streams it.
struct BlockGrid {
    int block_size = 0; // R
    int rows = 0;       // band_height - R + 1
    int cols = 0;       // band_width  - R + 1
    GrayImage band;

    std::vector<double> sv;   // rows*cols*R
    std::vector<double> feat; // rows*cols*R
    std::vector<double> svb;  // rows*cols
    std::vector<std::uint8_t> stable; // rows*cols: second singular value above the floor
    std::vector<int> lex_order;       // block indices sorted by feature vector
    bool features_ready = false;

    int count() const { return rows * cols; }
    int index(int r, int c) const { return r * cols + c; }
    int origin_row(int idx) const { return idx / cols; }
    int origin_col(int idx) const { return idx % cols; }
    const double* feature_of(int idx) const { return feat.data() + static_cast<std::size_t>(idx) * block_size; }

    BlockFeature block_feature(int idx) const;
};

// Validates 4 <= R <= 20 and R <= min(band dims); features are not computed.
BlockGrid tile_blocks(const GrayImage& coarse, int block_size);

// Fills sv/feat/svb for every block and the lexicographic ordering of the
// feature vectors (ties broken by block index). Values below `sv_floor` are
// clamped before the log so flat blocks stay finite. A block is marked
// unstable when every singular value past the first sits under the floor
// (rank <= 1, i.e. constant-like content with no texture signature);
// verification refuses such blocks.
void svd_features(BlockGrid& grid, double sv_floor = 1e-6);

} // namespace cmfd
