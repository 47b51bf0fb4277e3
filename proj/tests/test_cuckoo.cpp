#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmfd/cuckoo.hpp"
#include "cmfd/errors.hpp"
#include "support/oracles.hpp"

using namespace cmfd;

namespace {

// negative squared distance to a midbox optimum, each dimension normalized
// by its range
double neg_sphere(const DetectionParams& p) {
    auto term = [](double v, double c, double lo, double hi) {
        const double t = (v - c) / (hi - lo);
        return t * t;
    };
    return -(term(p.block_size, 12.0, 4.0, 20.0) + term(p.min_distance, 25.0, 10.0, 40.0) +
             term(p.threshold, 0.45, 0.001, 0.9));
}

double dist_to_center(const DetectionParams& p) {
    const double dr = p.block_size - 12.0;
    const double dd = p.min_distance - 25.0;
    const double dt = p.threshold - 0.45;
    return std::sqrt(dr * dr + dd * dd + dt * dt);
}

constexpr double kBoxDiagonal = 34.0118; // sqrt(16^2 + 30^2 + 0.899^2)

} // namespace

TEST_CASE("levy step stream is deterministic per seed") {
    Rng a(5), b(5), c(6);
    const auto s1 = levy_step(a, 1.5, 8);
    const auto s2 = levy_step(b, 1.5, 8);
    const auto s3 = levy_step(c, 1.5, 8);
    CHECK(s1 == s2);
    CHECK(s1 != s3);

    Rng r(1);
    CHECK_THROWS_AS(levy_step(r, 0.5, 3), ParameterError);
    CHECK_THROWS_AS(levy_step(r, 3.5, 3), ParameterError);
}

TEST_CASE("levy steps follow the requested power-law density") {
    // the step-length density decays like t^-lambda, so the survival tail
    // index is lambda-1 and the Hill estimate plus one recovers lambda
    Rng rng(2024);
    std::vector<double> steps;
    steps.reserve(1000000);
    for (int i = 0; i < 125000; ++i)
        for (double s : levy_step(rng, 1.5, 8)) steps.push_back(s);
    const double hill = oracles::hill_tail_index(steps, steps.size() / 100);
    const double density_exponent = hill + 1.0;
    MESSAGE("hill=", hill, " density_exponent=", density_exponent);
    CHECK(density_exponent == doctest::Approx(1.5).epsilon(0.2 / 1.5));
}

TEST_CASE("lambda 2 gives Cauchy-like tails, far heavier than gaussian steps") {
    Rng rng(31);
    std::vector<double> levy, gauss;
    for (int i = 0; i < 200000; ++i) {
        levy.push_back(std::abs(levy_step(rng, 2.0, 1)[0]));
        gauss.push_back(std::abs(rng.normal()));
    }
    const double q_levy = oracles::quantile(levy, 0.999);
    const double q_gauss = oracles::quantile(gauss, 0.999);
    MESSAGE("levy 99.9th=", q_levy, " gauss 99.9th=", q_gauss);
    CHECK(q_levy > 10.0 * q_gauss);
}

TEST_CASE("proposals respect the box and the zero-step cases") {
    CsConfig cfg;
    Rng rng(4);

    Nest best;
    best.position = {12.0, 25.0, 0.45};
    best.decoded = decode_params(best.position);

    SUBCASE("alpha 0 leaves the position unchanged") {
        CsConfig zero = cfg;
        zero.alpha_scale = 0.0;
        Nest n;
        n.position = {8.0, 30.0, 0.2};
        const Nest out = propose(n, best, zero, rng);
        CHECK(out.position == n.position);
    }
    SUBCASE("the best nest proposes itself under the biased variant") {
        CsConfig biased = cfg;
        biased.biased_toward_best = true;
        const Nest out = propose(best, best, biased, rng);
        CHECK(out.position == best.position);
    }
    SUBCASE("default (unbiased) steps move even from the best") {
        bool moved = false;
        Nest n = best;
        for (int i = 0; i < 16 && !moved; ++i) moved = propose(n, best, cfg, rng).position != n.position;
        CHECK(moved);
    }
    SUBCASE("clamping holds over many proposals, both variants") {
        CsConfig biased = cfg;
        biased.biased_toward_best = true;
        Nest n;
        n.position = {19.0, 39.0, 0.88};
        for (int i = 0; i < 5000; ++i) {
            for (const auto& variant : {cfg, biased}) {
                const Nest out = propose(n, best, variant, rng);
                for (int d = 0; d < 3; ++d) {
                    CHECK(out.position[d] >= DetectionParams::lower[d]);
                    CHECK(out.position[d] <= DetectionParams::upper[d]);
                }
            }
        }
    }
}

TEST_CASE("config validation") {
    CsConfig cfg;
    cfg.lambda = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = CsConfig{};
    cfg.p_a = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = CsConfig{};
    cfg.n_nests = 1;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = CsConfig{};
    cfg.max_evals = 10;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("sphere objective: convergence, budget, monotone trace, 20 seeds") {
    int random_wins = 0;
    std::vector<double> cs_best, rand_best;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CsConfig cfg;
        cfg.seed = seed;
        cfg.stop_fitness = 0.5; // unreachable for a non-positive objective
        const OptimizeResult res = optimize(neg_sphere, cfg);

        CHECK(res.evals_used <= cfg.max_evals);
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i].best_fitness >= res.trace[i - 1].best_fitness);

        const double dist = dist_to_center(res.best_params);
        MESSAGE("seed ", seed, ": dist=", dist, " evals=", res.evals_used);
        CHECK(dist <= 0.01 * kBoxDiagonal);
        cs_best.push_back(res.best_fitness);

        // same-budget uniform random baseline
        Rng rng(seed * 7919);
        double best_rand = -1e300;
        for (long e = 0; e < cfg.max_evals; ++e) {
            std::array<double, 3> pos;
            for (int d = 0; d < 3; ++d)
                pos[d] = rng.uniform(DetectionParams::lower[d], DetectionParams::upper[d]);
            best_rand = std::max(best_rand, neg_sphere(decode_params(pos)));
        }
        rand_best.push_back(best_rand);
        if (best_rand > res.best_fitness) ++random_wins;
    }
    std::sort(cs_best.begin(), cs_best.end());
    std::sort(rand_best.begin(), rand_best.end());
    MESSAGE("median cs=", cs_best[10], " median random=", rand_best[10], " random wins=", random_wins);
    CHECK(cs_best[10] > rand_best[10]);
}

TEST_CASE("degenerate optimizer runs") {
    SUBCASE("constant objective returns a valid point and a flat trace") {
        CsConfig cfg;
        cfg.max_evals = 200;
        cfg.stop_fitness = 2.0;
        const OptimizeResult res = optimize([](const DetectionParams&) { return 0.25; }, cfg);
        CHECK(res.best_fitness == 0.25);
        res.best_params.validate();
        for (const auto& t : res.trace) CHECK(t.best_fitness == 0.25);
    }
    SUBCASE("budget equal to the population evaluates only the initial nests") {
        CsConfig cfg;
        cfg.max_evals = cfg.n_nests;
        cfg.stop_fitness = 2.0;
        long calls = 0;
        const OptimizeResult res = optimize(
            [&calls](const DetectionParams&) {
                ++calls;
                return -1.0;
            },
            cfg);
        CHECK(res.evals_used == cfg.n_nests);
        CHECK(calls == cfg.n_nests);
        CHECK(res.trace.size() == 1);
    }
    SUBCASE("throwing objective is scored zero and the search survives") {
        CsConfig cfg;
        cfg.max_evals = 150;
        cfg.stop_fitness = 2.0;
        const OptimizeResult res = optimize(
            [](const DetectionParams& p) -> double {
                if (p.threshold < 0.45) throw NumericError("synthetic failure");
                return p.threshold;
            },
            cfg);
        CHECK(res.evals_used <= 150);
        CHECK(res.best_fitness >= 0.45);
    }
    SUBCASE("stop predicate halts the search") {
        CsConfig cfg;
        cfg.stop_fitness = 2.0;
        const OptimizeResult res = optimize(
            [](const DetectionParams& p) { return p.threshold; }, cfg,
            [](double best, const DetectionParams&) { return best >= 0.5; });
        CHECK(res.best_fitness >= 0.5);
        CHECK(res.evals_used < cfg.max_evals);
    }
}

TEST_CASE("optimizer determinism per seed") {
    CsConfig cfg;
    cfg.seed = 99;
    cfg.max_evals = 400;
    cfg.stop_fitness = 0.5;
    const OptimizeResult a = optimize(neg_sphere, cfg);
    const OptimizeResult b = optimize(neg_sphere, cfg);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.best_params.block_size == b.best_params.block_size);
    CHECK(a.best_params.min_distance == b.best_params.min_distance);
    CHECK(a.best_params.threshold == b.best_params.threshold);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i)
        CHECK(a.trace[i].best_fitness == b.trace[i].best_fitness);

    CsConfig other = cfg;
    other.seed = 100;
    const OptimizeResult c = optimize(neg_sphere, other);
    const bool same = a.best_params.min_distance == c.best_params.min_distance &&
                      a.best_params.threshold == c.best_params.threshold;
    CHECK(!same);
}

TEST_CASE("all evaluated parameters stay inside the box") {
    CsConfig cfg;
    cfg.seed = 3;
    cfg.max_evals = 500;
    cfg.stop_fitness = 2.0;
    bool violated = false;
    optimize(
        [&violated](const DetectionParams& p) {
            try {
                p.validate();
            } catch (const ParameterError&) {
                violated = true;
            }
            return p.threshold;
        },
        cfg);
    CHECK(!violated);
}
