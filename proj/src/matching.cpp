#include "cmfd/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmfd/errors.hpp"
#include "cmfd/kernels.hpp"

namespace cmfd {

void DetectionParams::validate() const {
    if (block_size < lower[0] || block_size > upper[0])
        throw ParameterError("block size R=" + std::to_string(block_size) + " outside [4,20]");
    if (min_distance < lower[1] || min_distance > upper[1])
        throw ParameterError("min distance D=" + std::to_string(min_distance) + " outside [10,40]");
    if (threshold < lower[2] || threshold > upper[2])
        throw ParameterError("threshold T=" + std::to_string(threshold) + " outside [0.001,0.9]");
}

std::size_t MatchSet::verified_count() const {
    std::size_t n = 0;
    for (const auto& p : pairs) n += p.verified ? 1 : 0;
    return n;
}

std::vector<std::pair<int, int>> MatchConfig::default_offsets() {
    std::vector<std::pair<int, int>> off;
    off.reserve(16);
    for (int dr : {-4, -1, 1, 4})
        for (int dc : {-4, -1, 1, 4}) off.emplace_back(dr, dc);
    return off;
}

double similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("similarity: feature lengths differ");
    const double d2 = kernels::ops().sq_dist(a.data(), b.data(), a.size());
    return 1.0 / (1.0 + std::sqrt(d2));
}

namespace {

inline bool canonical_less(int ra, int ca, int rb, int cb) {
    return ra != rb ? ra < rb : ca < cb;
}

MatchPair make_pair_entry(const BlockGrid& grid, int a, int b, double sim) {
    int ra = grid.origin_row(a), ca = grid.origin_col(a);
    int rb = grid.origin_row(b), cb = grid.origin_col(b);
    if (!canonical_less(ra, ca, rb, cb)) {
        std::swap(ra, rb);
        std::swap(ca, cb);
    }
    MatchPair p;
    p.row_i = ra;
    p.col_i = ca;
    p.row_j = rb;
    p.col_j = cb;
    p.similarity = sim;
    p.shift_dr = rb - ra;
    p.shift_dc = cb - ca;
    return p;
}

} // namespace

MatchSet find_matches(const BlockGrid& grid, const DetectionParams& params, const MatchConfig& cfg) {
    params.validate();
    if (!grid.features_ready) throw ValidationError("find_matches: grid features not computed");
    if (grid.block_size != params.block_size)
        throw ValidationError("find_matches: grid block size differs from params");

    const auto& k = kernels::ops();
    const int n = grid.count();
    const std::size_t lane = static_cast<std::size_t>(grid.block_size);
    const double d2_min = params.min_distance * params.min_distance;
    // S >= T  <=>  rho <= 1/T - 1
    const double rho_max = 1.0 / params.threshold - 1.0;
    const double rho2_max = rho_max * rho_max;

    MatchSet out;
    for (int si = 0; si < n; ++si) {
        const int a = grid.lex_order[si];
        const double* fa = grid.feat.data() + lane * a;
        const int k_end = std::min(cfg.window, n - 1 - si);
        for (int step = 1; step <= k_end; ++step) {
            const int b = grid.lex_order[si + step];
            const double* fb = grid.feat.data() + lane * b;
            const double rho2 = k.sq_dist(fa, fb, lane);
            if (rho2 > rho2_max) continue;
            const double dr = grid.origin_row(a) - grid.origin_row(b);
            const double dc = grid.origin_col(a) - grid.origin_col(b);
            if (dr * dr + dc * dc <= d2_min) continue;
            out.pairs.push_back(make_pair_entry(grid, a, b, 1.0 / (1.0 + std::sqrt(rho2))));
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const MatchPair& x, const MatchPair& y) {
        if (x.row_i != y.row_i) return x.row_i < y.row_i;
        if (x.col_i != y.col_i) return x.col_i < y.col_i;
        if (x.row_j != y.row_j) return x.row_j < y.row_j;
        return x.col_j < y.col_j;
    });
    return out;
}

MatchSet verify_neighborhoods(const MatchSet& matches, const BlockGrid& grid,
                              const DetectionParams& params, const MatchConfig& cfg) {
    params.validate();
    if (!grid.features_ready) throw ValidationError("verify_neighborhoods: grid features not computed");

    const auto& k = kernels::ops();
    const std::size_t lane = static_cast<std::size_t>(grid.block_size);
    const double rho_max = 1.0 / params.threshold - 1.0;
    const double rho2_max = rho_max * rho_max;
    const int total_offsets = static_cast<int>(cfg.offsets.size());

    MatchSet out = matches;
    for (auto& p : out.pairs) {
        // degenerate constant-like blocks match everything and prove nothing
        if (!grid.stable[grid.index(p.row_i, p.col_i)] || !grid.stable[grid.index(p.row_j, p.col_j)]) {
            p.verified = false;
            continue;
        }
        int valid = 0;
        int passes = 0;
        for (const auto& [dr, dc] : cfg.offsets) {
            const int ri = p.row_i + dr, ci = p.col_i + dc;
            const int rj = p.row_j + dr, cj = p.col_j + dc;
            if (ri < 0 || rj < 0 || ci < 0 || cj < 0 || ri >= grid.rows || rj >= grid.rows ||
                ci >= grid.cols || cj >= grid.cols)
                continue;
            ++valid;
            const double* fi = grid.feature_of(grid.index(ri, ci));
            const double* fj = grid.feature_of(grid.index(rj, cj));
            if (k.sq_dist(fi, fj, lane) <= rho2_max) ++passes;
        }
        // prorated quorum at grid edges; a pair with no testable neighbors
        // has no supporting evidence and stays unverified
        const int need = static_cast<int>(
            std::ceil(static_cast<double>(cfg.quorum) * valid / std::max(total_offsets, 1)));
        p.verified = valid > 0 && passes >= need;
    }
    return out;
}

MatchCache build_match_cache(const BlockGrid& grid, const MatchConfig& cfg) {
    if (!grid.features_ready) throw ValidationError("build_match_cache: grid features not computed");

    const auto& k = kernels::ops();
    const int n = grid.count();
    const std::size_t lane = static_cast<std::size_t>(grid.block_size);

    MatchCache cache;
    cache.config = cfg;
    const std::size_t window = static_cast<std::size_t>(cfg.window);
    const std::size_t cap = static_cast<std::size_t>(n) * window;
    cache.block_a.reserve(cap);
    cache.block_b.reserve(cap);
    cache.rho2.reserve(cap);
    cache.odist2.reserve(cap);
    cache.shift_dr.reserve(cap);
    cache.shift_dc.reserve(cap);
    cache.valid.reserve(cap);

    auto in_grid = [&grid](int r, int c) { return r >= 0 && c >= 0 && r < grid.rows && c < grid.cols; };

    for (int si = 0; si < n; ++si) {
        const int a = grid.lex_order[si];
        const double* fa = grid.feat.data() + lane * a;
        const int k_end = std::min(cfg.window, n - 1 - si);
        for (int step = 1; step <= k_end; ++step) {
            const int b = grid.lex_order[si + step];
            const double* fb = grid.feat.data() + lane * b;

            int ra = grid.origin_row(a), ca = grid.origin_col(a);
            int rb = grid.origin_row(b), cb = grid.origin_col(b);
            int ia = a, ib = b;
            if (!canonical_less(ra, ca, rb, cb)) {
                std::swap(ra, rb);
                std::swap(ca, cb);
                std::swap(ia, ib);
            }
            const double dr = rb - ra;
            const double dc = cb - ca;

            int valid = 0;
            for (const auto& [odr, odc] : cfg.offsets)
                if (in_grid(ra + odr, ca + odc) && in_grid(rb + odr, cb + odc)) ++valid;

            cache.block_a.push_back(ia);
            cache.block_b.push_back(ib);
            cache.rho2.push_back(k.sq_dist(fa, fb, lane));
            cache.odist2.push_back(dr * dr + dc * dc);
            cache.shift_dr.push_back(static_cast<std::int16_t>(rb - ra));
            cache.shift_dc.push_back(static_cast<std::int16_t>(cb - ca));
            cache.valid.push_back(static_cast<std::int8_t>(valid));
        }
    }
    cache.neighbor_rho2.assign(cache.size(), std::numeric_limits<double>::quiet_NaN());
    return cache;
}

DuplicateMap build_map(const MatchSet& matches, int band_rows, int band_cols,
                       const GrayImage& original, int block_size, int upsample) {
    if (band_rows <= 0 || band_cols <= 0 || upsample < 1)
        throw ValidationError("build_map: bad band dimensions");

    DuplicateMap dm;
    dm.q = Mask(band_cols, band_rows);
    auto stamp = [&](int r0, int c0) {
        for (int i = 0; i < block_size; ++i) {
            std::uint8_t* row = &dm.q.at(r0 + i, c0);
            std::fill(row, row + block_size, std::uint8_t{1});
        }
    };
    for (const auto& p : matches.pairs) {
        if (!p.verified) continue;
        stamp(p.row_i, p.col_i);
        stamp(p.row_j, p.col_j);
    }

    dm.mask = Mask(original.width, original.height);
    for (int y = 0; y < original.height; ++y) {
        const int br = std::min(y / upsample, band_rows - 1);
        for (int x = 0; x < original.width; ++x) {
            const int bc = std::min(x / upsample, band_cols - 1);
            dm.mask.at(y, x) = dm.q.at(br, bc);
        }
    }

    std::vector<double> weights(original.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = dm.mask.bits[i] ? 1.0 : 0.0;
    dm.map = GrayImage(original.width, original.height);
    kernels::ops().mul(weights.data(), original.pix.data(), dm.map.pix.data(), weights.size());
    return dm;
}

} // namespace cmfd
