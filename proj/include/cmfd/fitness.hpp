#pragma once

#include <optional>
#include <vector>

#include "cmfd/matching.hpp"

namespace cmfd {

struct FitnessReport {
    long tmb = 0;      // pairs in shift clusters large enough to be real
    long mmb = 0;      // remaining verified pairs
    double phi = 10.0; // mismatch coefficient with its floor
    double p_match = 0.0;
    int shift_dr = 0; // dominant cluster shift
    int shift_dc = 0;
};

// tmb/(tmb + phi) with phi = max(mmb, 10); 0 when tmb is 0.
double p_match(long tmb, long mmb);

// Clusters verified pairs by shift vector. A cluster qualifies as true
// matches when its population reaches max(3, 10% of verified pairs); the
// dominant shift is the largest cluster's (ties to the lexicographically
// smaller shift).
FitnessReport shift_filter(const MatchSet& matches);

// Single-pass candidate filter + verification + shift clustering against a
// MatchCache. Produces the same report as find_matches ->
// verify_neighborhoods -> shift_filter; the cache's lazy per-pair thresholds
// are filled as pairs first survive the (D, T) filters.
FitnessReport evaluate_with_cache(const BlockGrid& grid, MatchCache& cache,
                                  const DetectionParams& params);

struct DecisionPolicy {
    double min_p_match = 0.5;
    long min_tmb = 5;
};

bool is_detected(const FitnessReport& report, const DecisionPolicy& policy = {});

struct CorpusEntry {
    bool detected = false;
    bool is_forged = false;
    std::optional<double> iou; // present iff is_forged
};

struct CorpusScore {
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_defined = false;
    bool recall_defined = false;
    double mean_iou = 0.0;
};

// Image-level tally; undefined ratios are reported as 0 with their flag
// cleared. Throws ValidationError on an empty corpus.
CorpusScore score_corpus(const std::vector<CorpusEntry>& entries);

} // namespace cmfd
