#pragma once

#include <filesystem>
#include <string>

#include "cmfd/pipeline.hpp"

namespace cmfd {

// Flat key = value file, '#' comments. Unknown keys are ConfigError so typos
// fail loudly. See README for the full key list.
PipelineConfig load_config(const std::filesystem::path& path);

// Applies one key/value pair; shared by the file parser and CLI overrides.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

// "R=8,D=16,T=0.6" (any order, all three required).
DetectionParams parse_params_flag(const std::string& text);

} // namespace cmfd
