#include "cmfd/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cmfd/errors.hpp"
#include "cmfd/kernels.hpp"

namespace cmfd {

double p_match(long tmb, long mmb) {
    const double phi = mmb > 10 ? static_cast<double>(mmb) : 10.0;
    if (tmb <= 0) return 0.0;
    return static_cast<double>(tmb) / (static_cast<double>(tmb) + phi);
}

FitnessReport shift_filter(const MatchSet& matches) {
    std::map<std::pair<int, int>, long> clusters;
    long total = 0;
    for (const auto& p : matches.pairs) {
        if (!p.verified) continue;
        ++clusters[{p.shift_dr, p.shift_dc}];
        ++total;
    }

    FitnessReport rep;
    if (total == 0) return rep;

    const double qualify = std::max(3.0, 0.10 * static_cast<double>(total));
    long best_count = 0;
    std::pair<int, int> best_shift{0, 0};
    for (const auto& [shift, count] : clusters) {
        if (static_cast<double>(count) >= qualify) rep.tmb += count;
        // std::map iterates shifts in lexicographic order, so on a tie the
        // smaller shift is kept
        if (count > best_count) {
            best_count = count;
            best_shift = shift;
        }
    }
    rep.mmb = total - rep.tmb;
    rep.phi = rep.mmb > 10 ? static_cast<double>(rep.mmb) : 10.0;
    rep.p_match = p_match(rep.tmb, rep.mmb);
    rep.shift_dr = best_shift.first;
    rep.shift_dc = best_shift.second;
    return rep;
}

bool is_detected(const FitnessReport& report, const DecisionPolicy& policy) {
    return report.p_match >= policy.min_p_match && report.tmb >= policy.min_tmb;
}

namespace {

// need-th smallest squared neighbor distance of a pair; +inf when no offset
// is usable, -inf when the quorum is vacuous
double fill_neighbor_threshold(const BlockGrid& grid, const MatchCache& cache, std::size_t i) {
    const auto& cfg = cache.config;
    const int valid = cache.valid[i];
    if (valid == 0) return std::numeric_limits<double>::infinity();
    const int total = static_cast<int>(cfg.offsets.size());
    const int need = static_cast<int>(
        std::ceil(static_cast<double>(cfg.quorum) * valid / std::max(total, 1)));
    if (need <= 0) return -std::numeric_limits<double>::infinity();

    const auto& k = kernels::ops();
    const std::size_t lane = static_cast<std::size_t>(grid.block_size);
    const int ra = grid.origin_row(cache.block_a[i]), ca = grid.origin_col(cache.block_a[i]);
    const int rb = grid.origin_row(cache.block_b[i]), cb = grid.origin_col(cache.block_b[i]);

    double d2[64];
    int m = 0;
    for (const auto& [dr, dc] : cfg.offsets) {
        const int ri = ra + dr, ci = ca + dc, rj = rb + dr, cj = cb + dc;
        if (ri < 0 || ci < 0 || rj < 0 || cj < 0 || ri >= grid.rows || ci >= grid.cols ||
            rj >= grid.rows || cj >= grid.cols)
            continue;
        d2[m++] = k.sq_dist(grid.feature_of(grid.index(ri, ci)), grid.feature_of(grid.index(rj, cj)), lane);
    }
    std::nth_element(d2, d2 + (need - 1), d2 + m);
    return d2[need - 1];
}

} // namespace

FitnessReport evaluate_with_cache(const BlockGrid& grid, MatchCache& cache,
                                  const DetectionParams& params) {
    params.validate();
    if (grid.block_size != params.block_size)
        throw ValidationError("evaluate_with_cache: grid block size differs from params");

    const double rho_max = 1.0 / params.threshold - 1.0;
    const double rho2_max = rho_max * rho_max;
    const double d2_min = params.min_distance * params.min_distance;

    std::unordered_map<std::uint32_t, long> clusters;
    long total = 0;
    const std::size_t n = cache.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cache.rho2[i] > rho2_max || cache.odist2[i] <= d2_min) continue;
        if (!grid.stable[cache.block_a[i]] || !grid.stable[cache.block_b[i]]) continue;
        double thresh = cache.neighbor_rho2[i];
        if (std::isnan(thresh)) {
            thresh = fill_neighbor_threshold(grid, cache, i);
            cache.neighbor_rho2[i] = thresh;
        }
        if (thresh > rho2_max) continue; // quorum unreachable at this T
        const std::uint32_t key = (static_cast<std::uint32_t>(static_cast<std::uint16_t>(cache.shift_dr[i])) << 16) |
                                  static_cast<std::uint16_t>(cache.shift_dc[i]);
        ++clusters[key];
        ++total;
    }

    FitnessReport rep;
    if (total == 0) return rep;

    const double qualify = std::max(3.0, 0.10 * static_cast<double>(total));
    long best_count = 0;
    std::pair<int, int> best_shift{0, 0};
    for (const auto& [key, count] : clusters) {
        if (static_cast<double>(count) >= qualify) rep.tmb += count;
        const int dr = static_cast<std::int16_t>(key >> 16);
        const int dc = static_cast<std::int16_t>(key & 0xFFFF);
        if (count > best_count ||
            (count == best_count && std::make_pair(dr, dc) < best_shift)) {
            best_count = count;
            best_shift = {dr, dc};
        }
    }
    rep.mmb = total - rep.tmb;
    rep.phi = rep.mmb > 10 ? static_cast<double>(rep.mmb) : 10.0;
    rep.p_match = p_match(rep.tmb, rep.mmb);
    rep.shift_dr = best_shift.first;
    rep.shift_dc = best_shift.second;
    return rep;
}

CorpusScore score_corpus(const std::vector<CorpusEntry>& entries) {
    if (entries.empty()) throw ValidationError("score_corpus: empty corpus");

    CorpusScore s;
    double iou_sum = 0.0;
    long forged = 0;
    for (const auto& e : entries) {
        if (e.is_forged) {
            ++forged;
            if (e.detected)
                ++s.tp;
            else
                ++s.fn;
            iou_sum += e.iou.value_or(0.0);
        } else if (e.detected) {
            ++s.fp;
        }
    }
    if (s.tp + s.fp > 0) {
        s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
        s.precision_defined = true;
    }
    if (s.tp + s.fn > 0) {
        s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
        s.recall_defined = true;
    }
    s.mean_iou = forged > 0 ? iou_sum / static_cast<double>(forged) : 0.0;
    return s;
}

} // namespace cmfd
