#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cmfd/matching.hpp"
#include "cmfd/rng.hpp"

namespace cmfd {

// Candidate solution: a continuous point in the R/D/T box plus its decoded
// parameter triple. R is rounded at decode time so the walk itself stays
// continuous.
struct Nest {
    std::array<double, 3> position{};
    double fitness = 0.0;
    bool evaluated = false;
    DetectionParams decoded;
};

DetectionParams decode_params(const std::array<double, 3>& position);

struct CsConfig {
    int n_nests = 50;
    double p_a = 0.25;         // fraction of worst nests abandoned per generation
    double alpha_scale = 0.01; // step size as a fraction of each dimension's range
    double lambda = 1.5;       // power-law exponent of the step-length density
    long max_evals = 1500;
    std::uint64_t seed = 0;
    // Step interpretation: false is the plain scaled step, true scales by
    // (nest - best). The biased variant freezes once the population clusters
    // on the best nest (zero bias vector kills every proposal), so the plain
    // walk is the default.
    bool biased_toward_best = false;
    double stop_fitness = 1.0;
    long max_generations = 100000; // stall guard when caching starves the budget

    void validate() const;
};

// Heavy-tailed step per dimension (Mantegna's construction with index
// beta = lambda - 1, matching a step-length density ~ t^-lambda).
std::vector<double> levy_step(Rng& rng, double lambda, int dim);

// One cuckoo move from `nest`, clamped to the parameter box. The returned
// nest is not yet evaluated.
Nest propose(const Nest& nest, const Nest& best, const CsConfig& cfg, Rng& rng);

struct TracePoint {
    long generation = 0;
    long evals_used = 0;
    double best_fitness = 0.0;
    DetectionParams best_params;
};

struct OptimizeResult {
    DetectionParams best_params;
    double best_fitness = 0.0;
    long evals_used = 0;
    std::vector<TracePoint> trace; // one point per generation, monotone best
};

using Objective = std::function<double(const DetectionParams&)>;
// Receives (best fitness, best params); returning true stops the search.
using StopPredicate = std::function<bool(double, const DetectionParams&)>;

// Cuckoo search over the parameter box: per generation one Lévy cuckoo per
// nest challenges a uniformly random nest, then the worst ceil(p_a * n) nests
// (never the best) are rebuilt uniformly at random. Identical decoded
// parameters are served from a cache without spending budget. An objective
// that throws is logged, counted, and scored 0.
OptimizeResult optimize(const Objective& objective, const CsConfig& cfg,
                        const StopPredicate& stop = {});

} // namespace cmfd
