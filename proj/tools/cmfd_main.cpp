// cmfd: copy-move forgery detection with per-image parameter search.
// Subcommands: detect, tune, synth, bench. Exit codes: 0 success,
// 2 user/input error, 3 numerical failure, 4 invalid config.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cmfd/config.hpp"
#include "cmfd/corpus.hpp"
#include "cmfd/errors.hpp"
#include "cmfd/log.hpp"
#include "cmfd/pipeline.hpp"
#include "cmfd/report_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConfig = 4;

struct CommonArgs {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "cmfd_out";
};

cmfd::PipelineConfig make_config(const CommonArgs& args) {
    cmfd::PipelineConfig cfg;
    if (!args.config_file.empty()) cfg = cmfd::load_config(args.config_file);
    if (args.seed) cfg.cs.seed = *args.seed;
    return cfg;
}

int run_detect(const std::string& image_path, const CommonArgs& common, const std::string& params_flag,
               bool auto_tune, bool emit_trace) {
    const cmfd::PipelineConfig cfg = make_config(common);
    const cmfd::GrayImage img = cmfd::load_grayscale(image_path);

    cmfd::DetectionReport report;
    if (auto_tune) {
        report = cmfd::detect_auto(img, cfg);
    } else {
        const cmfd::DetectionParams params = cmfd::parse_params_flag(params_flag);
        const cmfd::ElementalResult res = cmfd::elemental_detect(img, params, cfg);
        report.best_params = params;
        report.fitness = res.fitness;
        report.map = res.map;
        report.detected = cmfd::is_detected(res.fitness, cfg.decision);
        report.evals_used = 0;
    }

    fs::create_directories(common.out_dir);
    const fs::path out(common.out_dir);
    cmfd::write_text_file(out / "report.json", cmfd::report_to_json(report));
    cmfd::save_mask_png(report.map.mask, out / "mask.png");
    cmfd::save_overlay_png(img, report.map.mask, out / "overlay.png");
    if (emit_trace && !report.trace.empty())
        cmfd::write_text_file(out / "trace.csv", cmfd::trace_to_csv(report.trace));

    std::cout << (report.detected ? "detected" : "clean") << " p_match=" << report.fitness.p_match
              << " tmb=" << report.fitness.tmb << " R=" << report.best_params.block_size
              << " D=" << report.best_params.min_distance << " T=" << report.best_params.threshold
              << " evals=" << report.evals_used << "\n";
    return kExitOk;
}

int run_synth(const std::string& source_dir, const CommonArgs& common, const std::string& preset,
              int make_sources, int source_size, bool no_authentic) {
    fs::path sources(source_dir);
    if (make_sources > 0) {
        if (sources.empty()) sources = fs::path(common.out_dir) / "sources";
        cmfd::make_source_images(sources, make_sources, source_size,
                                 common.seed.value_or(0) ^ 0x50u);
        std::cout << "wrote " << make_sources << " source images to " << sources << "\n";
        if (source_dir.empty() && preset.empty()) return kExitOk;
    }
    cmfd::SynthOptions opts;
    if (!preset.empty()) opts.preset = preset;
    opts.seed = common.seed.value_or(0);
    opts.keep_authentic = !no_authentic;
    const int n = cmfd::synthesize_corpus(sources, common.out_dir, opts);
    std::cout << "wrote " << n << " corpus items to " << common.out_dir << "\n";
    return kExitOk;
}

int run_bench(const std::string& corpus_dir, const CommonArgs& common, int jobs) {
    const cmfd::PipelineConfig cfg = make_config(common);
    const cmfd::BenchResult result =
        cmfd::run_bench(corpus_dir, cfg, common.seed.value_or(0), jobs);
    fs::create_directories(common.out_dir);
    const fs::path out(common.out_dir);
    cmfd::write_text_file(out / "results.csv", cmfd::bench_to_csv(result));
    cmfd::write_text_file(out / "summary.json", cmfd::bench_to_json(result));
    for (const auto& g : result.groups)
        std::cout << g.attack << " level=" << g.level << " precision=" << g.score.precision
                  << " recall=" << g.score.recall << " mean_iou=" << g.score.mean_iou << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"copy-move forgery detector with cuckoo-search parameter tuning"};
    app.require_subcommand(1);

    CommonArgs common;

    // detect / tune
    std::string image_path, params_flag;
    bool auto_tune = false, emit_trace = false;
    auto add_common = [&common](CLI::App* cmd) {
        cmd->add_option("--config", common.config_file, "flat key=value config file");
        cmd->add_option("--seed", common.seed, "master seed");
        cmd->add_option("--out", common.out_dir, "output directory");
    };

    CLI::App* detect = app.add_subcommand("detect", "analyze one image");
    detect->add_option("image", image_path, "image file (png/jpeg/pgm)")->required();
    detect->add_flag("--auto", auto_tune, "search R/D/T with cuckoo search");
    detect->add_option("--params", params_flag, "fixed parameters, e.g. R=8,D=16,T=0.6");
    detect->add_flag("--emit-trace", emit_trace, "write the optimizer trace CSV");
    add_common(detect);

    CLI::App* tune = app.add_subcommand("tune", "detect --auto --emit-trace");
    tune->add_option("image", image_path, "image file")->required();
    add_common(tune);

    // synth
    std::string source_dir, preset = "paper";
    int make_sources = 0, source_size = 256;
    bool no_authentic = false;
    CLI::App* synth = app.add_subcommand("synth", "build a forgery corpus with ground truth");
    synth->add_option("--sources", source_dir, "directory of source images");
    synth->add_option("--preset", preset, "attack preset: paper or plain");
    synth->add_option("--make-sources", make_sources, "generate N textured source images first");
    synth->add_option("--size", source_size, "generated source image size");
    synth->add_flag("--no-authentic", no_authentic, "skip authentic copies of the sources");
    add_common(synth);

    // bench
    std::string corpus_dir;
    int jobs = 1;
    CLI::App* bench = app.add_subcommand("bench", "run detect --auto over a corpus");
    bench->add_option("--corpus", corpus_dir, "corpus directory with manifests")->required();
    bench->add_option("--jobs", jobs, "concurrent images");
    add_common(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) {
            if (auto_tune == params_flag.empty() && !auto_tune) {
                std::cerr << "detect: provide exactly one of --auto or --params\n";
                return kExitUser;
            }
            if (auto_tune && !params_flag.empty()) {
                std::cerr << "detect: --auto and --params are mutually exclusive\n";
                return kExitUser;
            }
            return run_detect(image_path, common, params_flag, auto_tune, emit_trace);
        }
        if (tune->parsed()) return run_detect(image_path, common, "", true, true);
        if (synth->parsed()) {
            if (source_dir.empty() && make_sources <= 0) {
                std::cerr << "synth: provide --sources or --make-sources\n";
                return kExitUser;
            }
            return run_synth(source_dir, common, preset, make_sources, source_size, no_authentic);
        }
        if (bench->parsed()) return run_bench(corpus_dir, common, jobs);
        return kExitUser;
    } catch (const cmfd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cmfd::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cmfd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    }
}
