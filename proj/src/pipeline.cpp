#include "cmfd/pipeline.hpp"

#include <chrono>
#include <string>
#include <unordered_map>

#include "cmfd/blocks.hpp"
#include "cmfd/errors.hpp"
#include "cmfd/wavelet.hpp"

namespace cmfd {

namespace {

int upsample_factor(int levels) { return 1 << levels; }

void check_image_fits(const GrayImage& coarse, const DetectionParams& params) {
    if (params.block_size > coarse.width || params.block_size > coarse.height)
        throw ValidationError("image too small: coarse band " + std::to_string(coarse.width) + "x" +
                              std::to_string(coarse.height) + " cannot hold R=" +
                              std::to_string(params.block_size));
}

ElementalResult detect_on_band(const GrayImage& band, const GrayImage& img,
                               const DetectionParams& params, const PipelineConfig& cfg) {
    BlockGrid grid = tile_blocks(band, params.block_size);
    svd_features(grid, cfg.sv_floor);
    const MatchSet candidates = find_matches(grid, params, cfg.match);
    ElementalResult res;
    res.matches = verify_neighborhoods(candidates, grid, params, cfg.match);
    res.fitness = shift_filter(res.matches);
    res.map = build_map(res.matches, band.height, band.width, img, params.block_size,
                        upsample_factor(cfg.levels));
    return res;
}

} // namespace

ElementalResult elemental_detect(const GrayImage& img, const DetectionParams& params,
                                 const PipelineConfig& cfg) {
    params.validate();
    const GrayImage band = coarse_band(img, cfg.levels);
    check_image_fits(band, params);
    return detect_on_band(band, img, params, cfg);
}

DetectionReport detect_auto(const GrayImage& img, const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    const GrayImage band = coarse_band(img, cfg.levels);
    {
        DetectionParams smallest;
        smallest.block_size = 4;
        check_image_fits(band, smallest);
    }

    // the expensive per-R work (tiling + SVD + sort + window scan) is shared
    // across all (D, T) evaluations at that R
    struct PerBlockSize {
        BlockGrid grid;
        MatchCache cache;
    };
    std::unordered_map<int, PerBlockSize> grids;
    auto grid_for = [&](int r) -> PerBlockSize& {
        auto it = grids.find(r);
        if (it == grids.end()) {
            BlockGrid g = tile_blocks(band, r);
            svd_features(g, cfg.sv_floor);
            MatchCache c = build_match_cache(g, cfg.match);
            it = grids.emplace(r, PerBlockSize{std::move(g), std::move(c)}).first;
        }
        return it->second;
    };

    long last_tmb = 0;
    double last_p = -1.0;
    const Objective objective = [&](const DetectionParams& params) {
        if (params.block_size > band.width || params.block_size > band.height) return 0.0;
        PerBlockSize& state = grid_for(params.block_size);
        const FitnessReport rep = evaluate_with_cache(state.grid, state.cache, params);
        if (rep.p_match > last_p) {
            last_p = rep.p_match;
            last_tmb = rep.tmb;
        }
        return rep.p_match;
    };

    const StopPredicate stop = [&](double best_fitness, const DetectionParams&) {
        return best_fitness >= cfg.cs.stop_fitness && last_tmb >= cfg.stop_min_tmb;
    };

    const OptimizeResult opt = optimize(objective, cfg.cs, stop);

    DetectionReport report;
    report.best_params = opt.best_params;
    report.evals_used = opt.evals_used;
    report.trace = opt.trace;

    // full recompute at the winner; the report never carries cached state
    ElementalResult final = detect_on_band(band, img, opt.best_params, cfg);
    report.fitness = final.fitness;
    report.map = std::move(final.map);
    report.detected = is_detected(report.fitness, cfg.decision);

    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace cmfd
