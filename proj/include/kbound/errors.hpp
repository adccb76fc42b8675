#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kbound {

/// Base error type for the toolkit. Subclasses carry the failure category
/// so the C API can map exceptions onto stable status codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file contents (JSONL records, index files, transcripts).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Filesystem problems: missing paths, failed reads or writes.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values or missing required settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Contract violations at module boundaries (bad dimensions, empty inputs).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Command preconditions not met (missing index, mismatched ids).
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace kbound
