#include "cmfd/report_io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cmfd/errors.hpp"

namespace cmfd {

using nlohmann::ordered_json;

namespace {

ordered_json params_json(const DetectionParams& p) {
    return ordered_json{{"R", p.block_size}, {"D", p.min_distance}, {"T", p.threshold}};
}

ordered_json fitness_json(const FitnessReport& f) {
    return ordered_json{
        {"tmb", f.tmb},         {"mmb", f.mmb},
        {"phi", f.phi},         {"p_match", f.p_match},
        {"dominant_shift", ordered_json::array({f.shift_dr, f.shift_dc})},
    };
}

} // namespace

std::string report_to_json(const DetectionReport& report, bool include_wall_time) {
    ordered_json j;
    j["detected"] = report.detected;
    j["best_params"] = params_json(report.best_params);
    j["fitness"] = fitness_json(report.fitness);
    j["evals_used"] = report.evals_used;
    if (include_wall_time) j["wall_time_s"] = report.wall_time_s;
    j["detected_area"] = report.map.mask.count();
    return j.dump(2) + "\n";
}

std::string pairs_to_json(const MatchSet& matches) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : matches.pairs) {
        arr.push_back(ordered_json{
            {"origin_i", ordered_json::array({p.row_i, p.col_i})},
            {"origin_j", ordered_json::array({p.row_j, p.col_j})},
            {"similarity", p.similarity},
            {"shift", ordered_json::array({p.shift_dr, p.shift_dc})},
            {"verified", p.verified},
        });
    }
    return arr.dump(2) + "\n";
}

std::string corpus_score_to_json(const CorpusScore& s) {
    ordered_json j;
    j["tp"] = s.tp;
    j["fp"] = s.fp;
    j["fn"] = s.fn;
    j["precision"] = s.precision;
    j["precision_defined"] = s.precision_defined;
    j["recall"] = s.recall;
    j["recall_defined"] = s.recall_defined;
    j["mean_iou"] = s.mean_iou;
    return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
    std::string csv = "# schema: cmfd-trace/1\n";
    csv += "generation,evals_used,best_fitness,best_R,best_D,best_T\n";
    char line[160];
    for (const auto& t : trace) {
        std::snprintf(line, sizeof line, "%ld,%ld,%.9f,%d,%.6f,%.6f\n", t.generation, t.evals_used,
                      t.best_fitness, t.best_params.block_size, t.best_params.min_distance,
                      t.best_params.threshold);
        csv += line;
    }
    return csv;
}

} // namespace cmfd
