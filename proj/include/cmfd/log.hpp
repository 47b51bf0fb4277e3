#pragma once

#include <sstream>
#include <string>

namespace cmfd::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Threshold comes from the CMFD_LOG environment variable
// (debug|info|warn|error|off); default is warn.
Level threshold();
void set_threshold(Level l);
void write(Level l, const std::string& msg);

namespace detail {
template <typename... Args>
void emit(Level l, Args&&... args) {
    if (l < threshold()) return;
    std::ostringstream os;
    (os << ... << args);
    write(l, os.str());
}
} // namespace detail

template <typename... Args> void debug(Args&&... a) { detail::emit(Level::debug, a...); }
template <typename... Args> void info(Args&&... a)  { detail::emit(Level::info, a...); }
template <typename... Args> void warn(Args&&... a)  { detail::emit(Level::warn, a...); }
template <typename... Args> void error(Args&&... a) { detail::emit(Level::error, a...); }

} // namespace cmfd::log
