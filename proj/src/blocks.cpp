#include "cmfd/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmfd/errors.hpp"
#include "cmfd/svd.hpp"

namespace cmfd {

BlockFeature BlockGrid::block_feature(int idx) const {
    BlockFeature f;
    f.row = origin_row(idx);
    f.col = origin_col(idx);
    if (features_ready) {
        const std::size_t off = static_cast<std::size_t>(idx) * block_size;
        f.sv.assign(sv.begin() + off, sv.begin() + off + block_size);
        f.feature.assign(feat.begin() + off, feat.begin() + off + block_size);
        f.svb = svb[idx];
    }
    return f;
}

BlockGrid tile_blocks(const GrayImage& coarse, int block_size) {
    if (block_size < 4 || block_size > 20)
        throw ParameterError("tile_blocks: block size must be in [4, 20]");
    if (block_size > coarse.width || block_size > coarse.height)
        throw ParameterError("tile_blocks: block size " + std::to_string(block_size) +
                             " exceeds band " + std::to_string(coarse.width) + "x" +
                             std::to_string(coarse.height));
    BlockGrid grid;
    grid.block_size = block_size;
    grid.rows = coarse.height - block_size + 1;
    grid.cols = coarse.width - block_size + 1;
    grid.band = coarse;
    return grid;
}

void svd_features(BlockGrid& grid, double sv_floor) {
    const int r = grid.block_size;
    const int n = grid.count();
    const std::size_t lane = static_cast<std::size_t>(r);
    grid.sv.resize(lane * n);
    grid.feat.resize(lane * n);
    grid.svb.resize(n);
    grid.stable.resize(n);

    double scratch[20 * 20]; // block size is capped at 20 by tile_blocks
    for (int idx = 0; idx < n; ++idx) {
        const int r0 = grid.origin_row(idx);
        const int c0 = grid.origin_col(idx);
        // column-major copy: one contiguous lane per block column
        for (int j = 0; j < r; ++j)
            for (int i = 0; i < r; ++i)
                scratch[j * r + i] = grid.band.at(r0 + i, c0 + j);

        double* sv = grid.sv.data() + lane * idx;
        try {
            singular_values_inplace(scratch, r, sv);
        } catch (const NumericError& e) {
            throw NumericError("svd_features: block at (" + std::to_string(r0) + "," +
                               std::to_string(c0) + "): " + e.what());
        }

        double* f = grid.feat.data() + lane * idx;
        double sum = 0.0;
        for (int i = 0; i < r; ++i) {
            f[i] = -std::log(std::max(sv[i], sv_floor));
            sum += f[i];
        }
        grid.svb[idx] = sum;
        grid.stable[idx] = sv[1] >= sv_floor ? 1 : 0;
    }

    grid.lex_order.resize(n);
    for (int i = 0; i < n; ++i) grid.lex_order[i] = i;
    const double* feat = grid.feat.data();
    std::sort(grid.lex_order.begin(), grid.lex_order.end(), [feat, lane](int a, int b) {
        const double* fa = feat + lane * a;
        const double* fb = feat + lane * b;
        for (std::size_t i = 0; i < lane; ++i) {
            if (fa[i] < fb[i]) return true;
            if (fa[i] > fb[i]) return false;
        }
        return a < b;
    });
    grid.features_ready = true;
}

} // namespace cmfd
