#include "cmfd/cuckoo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

#include "cmfd/errors.hpp"
#include "cmfd/log.hpp"

namespace cmfd {

namespace {

constexpr const double* kLower = DetectionParams::lower;
constexpr const double* kUpper = DetectionParams::upper;

double clamp_dim(double v, int d) { return std::clamp(v, kLower[d], kUpper[d]); }

using ParamsKey = std::tuple<int, std::uint64_t, std::uint64_t>;

ParamsKey key_of(const DetectionParams& p) {
    std::uint64_t d, t;
    std::memcpy(&d, &p.min_distance, sizeof d);
    std::memcpy(&t, &p.threshold, sizeof t);
    return {p.block_size, d, t};
}

} // namespace

DetectionParams decode_params(const std::array<double, 3>& position) {
    DetectionParams p;
    p.block_size = static_cast<int>(std::lround(std::clamp(position[0], kLower[0], kUpper[0])));
    p.block_size = std::clamp(p.block_size, 4, 20);
    p.min_distance = clamp_dim(position[1], 1);
    p.threshold = clamp_dim(position[2], 2);
    return p;
}

void CsConfig::validate() const {
    if (lambda < 1.0 || lambda > 3.0) throw ParameterError("cuckoo: lambda must be in [1,3]");
    if (p_a < 0.0 || p_a > 1.0) throw ParameterError("cuckoo: p_a must be in [0,1]");
    if (n_nests < 2) throw ParameterError("cuckoo: need at least 2 nests");
    if (max_evals < n_nests) throw ParameterError("cuckoo: max_evals must cover the initial population");
    if (alpha_scale < 0.0) throw ParameterError("cuckoo: alpha must be non-negative");
    if (max_generations < 1) throw ParameterError("cuckoo: max_generations must be positive");
}

std::vector<double> levy_step(Rng& rng, double lambda, int dim) {
    if (lambda < 1.0 || lambda > 3.0) throw ParameterError("levy_step: lambda must be in [1,3]");
    // index of the stable step; the endpoints of the lambda range degenerate
    // (beta -> 0 blows up, beta -> 2 collapses sigma_u), so nudge inward
    const double beta = std::clamp(lambda - 1.0, 0.05, 1.95);
    const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
    const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
    const double sigma_u = std::pow(num / den, 1.0 / beta);

    std::vector<double> step(dim);
    for (int d = 0; d < dim; ++d) {
        const double u = sigma_u * rng.normal();
        const double v = rng.normal();
        step[d] = u / std::pow(std::abs(v), 1.0 / beta);
    }
    return step;
}

Nest propose(const Nest& nest, const Nest& best, const CsConfig& cfg, Rng& rng) {
    const std::vector<double> step = levy_step(rng, cfg.lambda, 3);
    Nest out;
    for (int d = 0; d < 3; ++d) {
        const double alpha = cfg.alpha_scale * (kUpper[d] - kLower[d]);
        const double move = cfg.biased_toward_best
                                ? alpha * step[d] * (nest.position[d] - best.position[d])
                                : alpha * step[d];
        out.position[d] = clamp_dim(nest.position[d] + move, d);
    }
    out.decoded = decode_params(out.position);
    return out;
}

OptimizeResult optimize(const Objective& objective, const CsConfig& cfg, const StopPredicate& stop) {
    cfg.validate();
    Rng rng(cfg.seed);

    std::map<ParamsKey, double> cache;
    long evals = 0;

    auto evaluate = [&](Nest& nest) {
        const ParamsKey key = key_of(nest.decoded);
        if (const auto it = cache.find(key); it != cache.end()) {
            nest.fitness = it->second;
            nest.evaluated = true;
            return;
        }
        double f = 0.0;
        try {
            f = objective(nest.decoded);
        } catch (const std::exception& e) {
            log::warn("objective failed at R=", nest.decoded.block_size, " D=", nest.decoded.min_distance,
                      " T=", nest.decoded.threshold, ": ", e.what());
            f = 0.0;
        }
        ++evals;
        cache.emplace(key, f);
        nest.fitness = f;
        nest.evaluated = true;
    };

    auto uniform_nest = [&]() {
        Nest n;
        for (int d = 0; d < 3; ++d) n.position[d] = rng.uniform(kLower[d], kUpper[d]);
        n.decoded = decode_params(n.position);
        return n;
    };

    const int n = cfg.n_nests;
    std::vector<Nest> nests(n);
    for (auto& nest : nests) {
        nest = uniform_nest();
        evaluate(nest);
    }

    int best_idx = 0;
    for (int i = 1; i < n; ++i)
        if (nests[i].fitness > nests[best_idx].fitness) best_idx = i;
    Nest best = nests[best_idx];

    auto should_stop = [&]() {
        if (stop) return stop(best.fitness, best.decoded);
        return best.fitness >= cfg.stop_fitness;
    };

    OptimizeResult result;
    result.trace.push_back({0, evals, best.fitness, best.decoded});

    for (long gen = 1; gen <= cfg.max_generations; ++gen) {
        if (evals >= cfg.max_evals || should_stop()) break;

        // one cuckoo per nest, each challenging a random nest
        for (int i = 0; i < n && evals < cfg.max_evals; ++i) {
            Nest cuckoo = propose(nests[i], best, cfg, rng);
            evaluate(cuckoo);
            const std::size_t j = rng.index(static_cast<std::size_t>(n));
            if (cuckoo.fitness > nests[j].fitness) {
                // j pointing at the elite implies the cuckoo beats it, so
                // the best solution is never lost by this replacement
                nests[j] = cuckoo;
                if (cuckoo.fitness > best.fitness) {
                    best = cuckoo;
                    best_idx = static_cast<int>(j);
                }
            }
            if (should_stop()) break;
        }

        // abandon the worst fraction, never the elite
        if (evals < cfg.max_evals && !should_stop()) {
            const int abandon = static_cast<int>(std::ceil(cfg.p_a * n));
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return nests[a].fitness < nests[b].fitness; });
            int replaced = 0;
            for (int idx : order) {
                if (replaced >= abandon || evals >= cfg.max_evals) break;
                if (idx == best_idx) continue;
                nests[idx] = uniform_nest();
                evaluate(nests[idx]);
                if (nests[idx].fitness > best.fitness) {
                    best = nests[idx];
                    best_idx = idx;
                }
                ++replaced;
            }
        }

        result.trace.push_back({gen, evals, best.fitness, best.decoded});
        if (should_stop()) break;
    }

    result.best_params = best.decoded;
    result.best_fitness = best.fitness;
    result.evals_used = evals;
    return result;
}

} // namespace cmfd
