#pragma once

#include <stdexcept>
#include <string>

namespace cmfd {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
struct IoError : Error {
    using Error::Error;
};

// Decodable but unsupported image encodings.
struct FormatError : IoError {
    using IoError::IoError;
};

// Inputs that violate an operation's preconditions (bad rects, sizes, params).
struct ValidationError : Error {
    using Error::Error;
};

struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

struct ParameterError : ValidationError {
    using ValidationError::ValidationError;
};

// Iterative numerics that failed to converge.
struct NumericError : Error {
    using Error::Error;
};

// Malformed config files or unknown keys.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace cmfd
