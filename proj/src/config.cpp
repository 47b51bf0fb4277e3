#include "cmfd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cmfd/errors.hpp"

namespace cmfd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + v + "' for " + key);
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + v + "' for " + key);
    }
}

std::vector<std::pair<int, int>> parse_offsets(const std::string& key, const std::string& v) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("config: offset '" + item + "' for " + key + " is not dr:dc");
        out.emplace_back(static_cast<int>(to_long(key, trim(item.substr(0, colon)))),
                         static_cast<int>(to_long(key, trim(item.substr(colon + 1)))));
    }
    if (out.empty()) throw ConfigError("config: empty offset list for " + key);
    return out;
}

} // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "levels") {
        cfg.levels = static_cast<int>(to_long(key, value));
        if (cfg.levels < 1) throw ConfigError("config: levels must be >= 1");
    } else if (key == "sv_floor") {
        cfg.sv_floor = to_double(key, value);
        if (cfg.sv_floor <= 0.0) throw ConfigError("config: sv_floor must be positive");
    } else if (key == "match.window") {
        cfg.match.window = static_cast<int>(to_long(key, value));
        if (cfg.match.window < 1) throw ConfigError("config: match.window must be >= 1");
    } else if (key == "verify.quorum") {
        cfg.match.quorum = static_cast<int>(to_long(key, value));
        if (cfg.match.quorum < 0) throw ConfigError("config: verify.quorum must be >= 0");
    } else if (key == "verify.offsets") {
        cfg.match.offsets = value == "default" ? MatchConfig::default_offsets()
                                               : parse_offsets(key, value);
    } else if (key == "decision.min_p_match") {
        cfg.decision.min_p_match = to_double(key, value);
    } else if (key == "decision.min_tmb") {
        cfg.decision.min_tmb = to_long(key, value);
    } else if (key == "cs.n_nests") {
        cfg.cs.n_nests = static_cast<int>(to_long(key, value));
    } else if (key == "cs.p_a") {
        cfg.cs.p_a = to_double(key, value);
    } else if (key == "cs.alpha") {
        cfg.cs.alpha_scale = to_double(key, value);
    } else if (key == "cs.lambda") {
        cfg.cs.lambda = to_double(key, value);
    } else if (key == "cs.max_evals") {
        cfg.cs.max_evals = to_long(key, value);
    } else if (key == "cs.max_generations") {
        cfg.cs.max_generations = to_long(key, value);
    } else if (key == "cs.seed") {
        cfg.cs.seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "cs.variant") {
        if (value == "biased")
            cfg.cs.biased_toward_best = true;
        else if (value == "unbiased")
            cfg.cs.biased_toward_best = false;
        else
            throw ConfigError("config: cs.variant must be biased or unbiased");
    } else if (key == "cs.stop_fitness") {
        cfg.cs.stop_fitness = to_double(key, value);
    } else if (key == "cs.stop_min_tmb") {
        cfg.stop_min_tmb = to_long(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");

    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        apply_config_entry(cfg, key, value);
    }
    try {
        cfg.cs.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

DetectionParams parse_params_flag(const std::string& text) {
    DetectionParams p;
    bool have_r = false, have_d = false, have_t = false;
    auto number = [](const std::string& name, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ValidationError("--params: bad value '" + v + "' for " + name);
        }
    };
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError("--params: '" + item + "' is not name=value");
        const std::string name = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (name == "R" || name == "r") {
            p.block_size = static_cast<int>(std::lround(number(name, value)));
            have_r = true;
        } else if (name == "D" || name == "d") {
            p.min_distance = number(name, value);
            have_d = true;
        } else if (name == "T" || name == "t") {
            p.threshold = number(name, value);
            have_t = true;
        } else {
            throw ValidationError("--params: unknown component '" + name + "'");
        }
    }
    if (!(have_r && have_d && have_t))
        throw ValidationError("--params requires R=, D= and T= components");
    p.validate();
    return p;
}

} // namespace cmfd
