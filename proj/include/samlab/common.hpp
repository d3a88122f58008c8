#pragma once

#include <stdexcept>
#include <string>

namespace samlab {

inline constexpr const char* kVersion = "0.1.0";

/// Bad or inconsistent configuration (specs, shapes, flags). CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation called in the wrong order (e.g. backward before forward).
struct StateError : std::logic_error {
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Invalid numeric input (zero direction vector, NaN loss, ...). CLI exit code 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure. CLI exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace samlab
