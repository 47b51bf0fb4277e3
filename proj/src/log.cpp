#include "cmfd/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace cmfd::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("CMFD_LOG");
    if (!v) return Level::warn;
    if (std::strcmp(v, "debug") == 0) return Level::debug;
    if (std::strcmp(v, "info") == 0) return Level::info;
    if (std::strcmp(v, "warn") == 0) return Level::warn;
    if (std::strcmp(v, "error") == 0) return Level::error;
    if (std::strcmp(v, "off") == 0) return Level::off;
    return Level::warn;
}

std::atomic<Level>& threshold_slot() {
    static std::atomic<Level> slot{parse_env()};
    return slot;
}

const char* tag(Level l) {
    switch (l) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        default: return "error";
    }
}

std::mutex out_mutex;

} // namespace

Level threshold() { return threshold_slot().load(std::memory_order_relaxed); }

void set_threshold(Level l) { threshold_slot().store(l, std::memory_order_relaxed); }

void write(Level l, const std::string& msg) {
    std::lock_guard lock(out_mutex);
    std::cerr << "[cmfd " << tag(l) << "] " << msg << '\n';
}

} // namespace cmfd::log
