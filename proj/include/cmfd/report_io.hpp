#pragma once

#include <filesystem>
#include <string>

#include "cmfd/fitness.hpp"
#include "cmfd/pipeline.hpp"

namespace cmfd {

// JSON bodies are stable for fixed inputs: keys are emitted in a fixed order
// and doubles with shortest round-trip formatting.
std::string report_to_json(const DetectionReport& report, bool include_wall_time = true);
std::string pairs_to_json(const MatchSet& matches);
std::string corpus_score_to_json(const CorpusScore& score);

void write_text_file(const std::filesystem::path& path, const std::string& body);

// generation, evals_used, best_fitness, best R/D/T — one row per generation.
std::string trace_to_csv(const std::vector<TracePoint>& trace);

} // namespace cmfd
