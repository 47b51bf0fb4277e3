#pragma once

#include "cmfd/cuckoo.hpp"
#include "cmfd/fitness.hpp"
#include "cmfd/image.hpp"
#include "cmfd/matching.hpp"

namespace cmfd {

// Everything tunable that the optimizer does not search.
struct PipelineConfig {
    int levels = 1; // wavelet decompositions before blocking
    double sv_floor = 1e-6;
    MatchConfig match;
    DecisionPolicy decision;
    CsConfig cs;
    long stop_min_tmb = 20; // early stop needs a saturated p_match AND this many true matches
};

struct ElementalResult {
    MatchSet matches; // with verified flags
    FitnessReport fitness;
    DuplicateMap map;
};

// Fixed-parameter detection pass: coarse band -> overlapping blocks -> SVD
// features -> window matching -> neighborhood verification -> shift
// clustering -> duplicate map. Pure in (img, params, cfg).
ElementalResult elemental_detect(const GrayImage& img, const DetectionParams& params,
                                 const PipelineConfig& cfg = {});

struct DetectionReport {
    DetectionParams best_params;
    FitnessReport fitness;
    DuplicateMap map;
    bool detected = false;
    long evals_used = 0;
    double wall_time_s = 0.0; // excluded from determinism comparisons
    std::vector<TracePoint> trace;
};

// Cuckoo-search tuning of (R, D, T) against p_match, then a full elemental
// pass at the winning parameters. Feature grids are cached per R, fitness
// per decoded triple, so repeated visits cost no budget.
DetectionReport detect_auto(const GrayImage& img, const PipelineConfig& cfg = {});

} // namespace cmfd
