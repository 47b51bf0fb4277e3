#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cmfd/fitness.hpp"
#include "cmfd/pipeline.hpp"
#include "cmfd/synth.hpp"

namespace cmfd {

// One corpus image as recorded in its .manifest.json sidecar.
struct CorpusItem {
    std::string image_file; // relative to the corpus directory
    std::string mask_file;  // empty for authentic images
    bool is_forged = false;
    std::string attack = "none";
    double level = 0.0;
    int shift_dx = 0;
    int shift_dy = 0;
    std::uint64_t seed = 0;
    std::optional<ForgerySpec> spec;
};

std::string manifest_to_json(const CorpusItem& item);
CorpusItem manifest_from_json(const std::string& body);

// Items of every *.manifest.json under dir, sorted by image file name.
std::vector<CorpusItem> load_corpus(const std::filesystem::path& dir);

// The attack schedule swept by the robustness experiments: plain copy-move,
// five noise sigmas, nine JPEG qualities, eight scale factors.
std::vector<Attack> paper_attacks();

// Deterministic forgery geometry for a square image: an even-aligned source
// square of at least 48 px pasted far enough away that the pair survives any
// distance filter in the search box.
ForgerySpec plan_forgery(int image_size, const Attack& attack, Rng& rng);

struct SynthOptions {
    std::string preset = "paper"; // or "plain": one plain forgery per source
    std::uint64_t seed = 0;
    bool keep_authentic = true; // also copy each source as an authentic item
};

// Forges every readable image in source_dir into out_dir with masks and
// manifests. Returns the number of corpus items written.
int synthesize_corpus(const std::filesystem::path& source_dir, const std::filesystem::path& out_dir,
                      const SynthOptions& opts);

// Writes n deterministic textured source images (<prefix>NNN.pgm) into dir.
int make_source_images(const std::filesystem::path& dir, int count, int size, std::uint64_t seed,
                       const std::string& prefix = "source_");

struct BenchImageResult {
    CorpusItem item;
    bool detected = false;
    double p_match = 0.0;
    long tmb = 0;
    long mmb = 0;
    double iou = 0.0;
    DetectionParams best_params;
    long evals_used = 0;
};

struct BenchGroup {
    std::string attack;
    double level = 0.0;
    CorpusScore score;
};

struct BenchResult {
    std::vector<BenchImageResult> images; // corpus order
    std::vector<BenchGroup> groups;       // per (attack, level), plain first
    std::uint64_t master_seed = 0;
};

// Auto-detects every corpus image. Per-image seeds derive from the master
// seed and the image index; `jobs` images run concurrently and results are
// merged in corpus order, so output bytes do not depend on scheduling.
// Precision for a group counts false positives over the shared authentic set.
BenchResult run_bench(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg,
                      std::uint64_t master_seed, int jobs = 1);

std::string bench_to_csv(const BenchResult& result);
std::string bench_to_json(const BenchResult& result);

} // namespace cmfd
