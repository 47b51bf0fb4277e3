#include "cmfd/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cmfd/errors.hpp"
#include "cmfd/log.hpp"
#include "cmfd/report_io.hpp"

namespace cmfd {

using nlohmann::ordered_json;

namespace {

ordered_json spec_json(const ForgerySpec& s) {
    return ordered_json{
        {"source", ordered_json::array({s.source.x, s.source.y, s.source.w, s.source.h})},
        {"target", ordered_json::array({s.target_x, s.target_y})},
        {"attack", attack_name(s.attack.kind)},
        {"level", attack_level(s.attack)},
    };
}

ForgerySpec spec_from_json(const ordered_json& j) {
    ForgerySpec s;
    const auto& r = j.at("source");
    s.source = Rect{r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(), r.at(3).get<int>()};
    s.target_x = j.at("target").at(0).get<int>();
    s.target_y = j.at("target").at(1).get<int>();
    const std::string kind = j.at("attack").get<std::string>();
    const double level = j.at("level").get<double>();
    if (kind == "plain")
        s.attack = Attack::plain();
    else if (kind == "noise")
        s.attack = Attack::gaussian(level);
    else if (kind == "jpeg")
        s.attack = Attack::jpeg(static_cast<int>(level));
    else if (kind == "scale")
        s.attack = Attack::rescale(level);
    else
        throw ValidationError("manifest: unknown attack '" + kind + "'");
    return s;
}

} // namespace

std::string manifest_to_json(const CorpusItem& item) {
    ordered_json j;
    j["image"] = item.image_file;
    j["forged"] = item.is_forged;
    j["attack"] = item.attack;
    j["level"] = item.level;
    j["seed"] = item.seed;
    if (item.is_forged) {
        j["mask"] = item.mask_file;
        j["shift"] = ordered_json::array({item.shift_dx, item.shift_dy});
        j["spec"] = spec_json(*item.spec);
    }
    return j.dump(2) + "\n";
}

CorpusItem manifest_from_json(const std::string& body) {
    ordered_json j;
    try {
        j = ordered_json::parse(body);
        CorpusItem item;
        item.image_file = j.at("image").get<std::string>();
        item.is_forged = j.at("forged").get<bool>();
        item.attack = j.at("attack").get<std::string>();
        item.level = j.at("level").get<double>();
        item.seed = j.at("seed").get<std::uint64_t>();
        if (item.is_forged) {
            item.mask_file = j.at("mask").get<std::string>();
            item.shift_dx = j.at("shift").at(0).get<int>();
            item.shift_dy = j.at("shift").at(1).get<int>();
            item.spec = spec_from_json(j.at("spec"));
        }
        return item;
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
}

std::vector<CorpusItem> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("corpus directory '" + dir.string() + "' does not exist");
    std::vector<std::filesystem::path> manifests;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 14 && name.ends_with(".manifest.json")) manifests.push_back(entry.path());
    }
    std::sort(manifests.begin(), manifests.end());

    std::vector<CorpusItem> items;
    items.reserve(manifests.size());
    for (const auto& m : manifests) {
        std::ifstream in(m, std::ios::binary);
        if (!in) throw IoError("cannot read '" + m.string() + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            items.push_back(manifest_from_json(ss.str()));
        } catch (const ValidationError& e) {
            throw ValidationError(m.string() + ": " + e.what());
        }
    }
    std::sort(items.begin(), items.end(),
              [](const CorpusItem& a, const CorpusItem& b) { return a.image_file < b.image_file; });
    return items;
}

std::vector<Attack> paper_attacks() {
    std::vector<Attack> attacks;
    attacks.push_back(Attack::plain());
    for (double sigma : {0.02, 0.04, 0.06, 0.08, 0.10}) attacks.push_back(Attack::gaussian(sigma));
    for (int q = 100; q >= 20; q -= 10) attacks.push_back(Attack::jpeg(q));
    for (double pct : {40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 200.0})
        attacks.push_back(Attack::rescale(pct));
    return attacks;
}

ForgerySpec plan_forgery(int image_size, const Attack& attack, Rng& rng) {
    if (image_size < 256) throw ValidationError("plan_forgery: image size must be >= 256");

    // even-aligned geometry keeps the copy on the wavelet decimation grid
    auto even_pick = [&rng](int lo, int hi) { // even value in [lo, hi]
        const int n = (hi - lo) / 2 + 1;
        return lo + 2 * static_cast<int>(rng.uniform(0.0, static_cast<double>(n)));
    };
    const int side = even_pick(48, 64);

    ForgerySpec spec;
    spec.attack = attack;
    spec.source.x = even_pick(8, 24);
    spec.source.y = even_pick(8, 24);
    spec.source.w = side;
    spec.source.h = side;

    // the same geometry is reused for every attack on a source, so leave
    // room for the worst pasted extent (200% rescale) and keep the shift
    // long enough to clear the widest distance filter after decimation
    const int pasted_worst = 2 * side;
    const int min_shift = 96;
    const int max_shift_x = image_size - 8 - pasted_worst - spec.source.x;
    const int max_shift_y = image_size - 8 - pasted_worst - spec.source.y;
    if (max_shift_x < min_shift || max_shift_y < min_shift)
        throw ValidationError("plan_forgery: pasted patch does not fit");
    spec.target_x = spec.source.x + even_pick(min_shift, max_shift_x);
    spec.target_y = spec.source.y + even_pick(min_shift, max_shift_y);
    return spec;
}

int make_source_images(const std::filesystem::path& dir, int count, int size, std::uint64_t seed,
                       const std::string& prefix) {
    std::filesystem::create_directories(dir);
    char name[64];
    for (int i = 0; i < count; ++i) {
        std::snprintf(name, sizeof name, "%s%03d.pgm", prefix.c_str(), i);
        save_pgm16(make_texture(size, size, mix_seed(seed, static_cast<std::uint64_t>(i))), dir / name);
    }
    return count;
}

int synthesize_corpus(const std::filesystem::path& source_dir, const std::filesystem::path& out_dir,
                      const SynthOptions& opts) {
    if (!std::filesystem::is_directory(source_dir))
        throw IoError("source directory '" + source_dir.string() + "' does not exist");

    std::vector<std::filesystem::path> sources;
    for (const auto& entry : std::filesystem::directory_iterator(source_dir)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            sources.push_back(entry.path());
    }
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) throw ValidationError("no readable source images in '" + source_dir.string() + "'");

    std::vector<Attack> attacks;
    if (opts.preset == "paper") {
        attacks = paper_attacks();
    } else if (opts.preset == "plain") {
        attacks = {Attack::plain()};
    } else {
        throw ValidationError("unknown synth preset '" + opts.preset + "'");
    }

    std::filesystem::create_directories(out_dir);
    int written = 0;
    char buf[160];
    for (std::size_t si = 0; si < sources.size(); ++si) {
        const GrayImage src = load_grayscale(sources[si]);
        const std::string stem = sources[si].stem().string();

        if (opts.keep_authentic) {
            CorpusItem item;
            std::snprintf(buf, sizeof buf, "%s_authentic.pgm", stem.c_str());
            item.image_file = buf;
            item.is_forged = false;
            item.seed = mix_seed(opts.seed, si);
            save_pgm16(src, out_dir / item.image_file);
            write_text_file(out_dir / (item.image_file + ".manifest.json"), manifest_to_json(item));
            ++written;
        }

        // one geometry per source; every attack reuses it so sweeps compare
        // like against like
        Rng geom_rng(mix_seed(opts.seed, 0x9e0 + si));
        ForgerySpec base = plan_forgery(std::min(src.width, src.height), Attack::plain(), geom_rng);

        for (std::size_t ai = 0; ai < attacks.size(); ++ai) {
            ForgerySpec spec = base;
            spec.attack = attacks[ai];
            const std::uint64_t seed = mix_seed(opts.seed, (si << 16) ^ ai);
            auto [forged, gt] = synthesize_forgery(src, spec, seed);

            CorpusItem item;
            std::snprintf(buf, sizeof buf, "%s_%s_%g.pgm", stem.c_str(),
                          attack_name(spec.attack.kind), attack_level(spec.attack));
            item.image_file = buf;
            item.mask_file = item.image_file.substr(0, item.image_file.size() - 4) + "_mask.png";
            item.is_forged = true;
            item.attack = attack_name(spec.attack.kind);
            item.level = attack_level(spec.attack);
            item.shift_dx = gt.shift_dx;
            item.shift_dy = gt.shift_dy;
            item.seed = seed;
            item.spec = spec;

            save_pgm16(forged, out_dir / item.image_file);
            save_mask_png(gt.mask, out_dir / item.mask_file);
            write_text_file(out_dir / (item.image_file + ".manifest.json"), manifest_to_json(item));
            ++written;
        }
    }
    return written;
}

namespace {

BenchImageResult bench_one(const std::filesystem::path& corpus_dir, const CorpusItem& item,
                           PipelineConfig cfg, std::uint64_t master_seed, std::size_t index) {
    BenchImageResult res;
    res.item = item;
    const GrayImage img = load_grayscale(corpus_dir / item.image_file);
    cfg.cs.seed = mix_seed(master_seed, index);
    const DetectionReport report = detect_auto(img, cfg);
    res.detected = report.detected;
    res.p_match = report.fitness.p_match;
    res.tmb = report.fitness.tmb;
    res.mmb = report.fitness.mmb;
    res.best_params = report.best_params;
    res.evals_used = report.evals_used;
    if (item.is_forged) {
        const Mask gt = load_mask_png(corpus_dir / item.mask_file);
        res.iou = mask_iou(report.map.mask, gt);
    }
    return res;
}

} // namespace

BenchResult run_bench(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg,
                      std::uint64_t master_seed, int jobs) {
    const std::vector<CorpusItem> items = load_corpus(corpus_dir);
    if (items.empty()) throw ValidationError("corpus '" + corpus_dir.string() + "' has no manifests");

    BenchResult result;
    result.master_seed = master_seed;
    result.images.resize(items.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            try {
                result.images[i] = bench_one(corpus_dir, items[i], cfg, master_seed, i);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!failed.exchange(true)) first_error = items[i].image_file + ": " + e.what();
            }
        }
    };

    const int n_threads = std::clamp(jobs, 1, 64);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw Error("bench: " + first_error);

    // shared negatives: authentic images feed every group's precision
    long fp_authentic = 0;
    for (const auto& r : result.images)
        if (!r.item.is_forged && r.detected) ++fp_authentic;

    std::map<std::pair<std::string, double>, std::vector<const BenchImageResult*>> groups;
    for (const auto& r : result.images)
        if (r.item.is_forged) groups[{r.item.attack, r.item.level}].push_back(&r);

    for (const auto& [key, members] : groups) {
        BenchGroup g;
        g.attack = key.first;
        g.level = key.second;
        std::vector<CorpusEntry> entries;
        for (const auto* m : members)
            entries.push_back({m->detected, true, m->iou});
        CorpusScore s = score_corpus(entries);
        s.fp = fp_authentic;
        s.precision_defined = s.tp + s.fp > 0;
        s.precision = s.precision_defined ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
        g.score = s;
        result.groups.push_back(g);
    }
    std::sort(result.groups.begin(), result.groups.end(), [](const BenchGroup& a, const BenchGroup& b) {
        if (a.attack != b.attack) return a.attack < b.attack;
        return a.level < b.level;
    });
    return result;
}

std::string bench_to_csv(const BenchResult& result) {
    std::string csv = "# schema: cmfd-bench/1\n";
    csv += "attack,level,precision,recall,mean_iou\n";
    char line[160];
    for (const auto& g : result.groups) {
        std::snprintf(line, sizeof line, "%s,%g,%.6f,%.6f,%.6f\n", g.attack.c_str(), g.level,
                      g.score.precision, g.score.recall, g.score.mean_iou);
        csv += line;
    }
    return csv;
}

std::string bench_to_json(const BenchResult& result) {
    ordered_json j;
    j["schema"] = "cmfd-bench/1";
    j["master_seed"] = result.master_seed;

    ordered_json groups = ordered_json::array();
    for (const auto& g : result.groups) {
        groups.push_back(ordered_json{
            {"attack", g.attack},
            {"level", g.level},
            {"tp", g.score.tp},
            {"fp", g.score.fp},
            {"fn", g.score.fn},
            {"precision", g.score.precision},
            {"recall", g.score.recall},
            {"mean_iou", g.score.mean_iou},
        });
    }
    j["groups"] = groups;

    ordered_json images = ordered_json::array();
    for (const auto& r : result.images) {
        images.push_back(ordered_json{
            {"image", r.item.image_file},
            {"forged", r.item.is_forged},
            {"attack", r.item.attack},
            {"level", r.item.level},
            {"detected", r.detected},
            {"p_match", r.p_match},
            {"tmb", r.tmb},
            {"mmb", r.mmb},
            {"iou", r.iou},
            {"best_params", ordered_json{{"R", r.best_params.block_size},
                                         {"D", r.best_params.min_distance},
                                         {"T", r.best_params.threshold}}},
            {"evals_used", r.evals_used},
        });
    }
    j["images"] = images;
    return j.dump(2) + "\n";
}

} // namespace cmfd
