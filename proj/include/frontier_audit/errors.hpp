#pragma once

#include <stdexcept>
#include <string>

namespace frontier_audit {

// Base for everything this library throws on its own behalf.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input bytes: CSV cells, dates, JSON lines.
struct ParseError : Error {
    using Error::Error;
};

// Well-formed input that violates a documented invariant
// (duplicate key, score outside the declared range, bad enum).
struct ValidationError : Error {
    using Error::Error;
};

// Content hash of a loaded artifact does not match its companion digest.
struct IntegrityError : Error {
    using Error::Error;
};

// A lookup precondition failed hard enough that no value can be returned.
struct LookupError : Error {
    using Error::Error;
};

// Inconsistent or incomplete run configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem trouble: unreadable path, failed write, missing companion file.
struct IoError : Error {
    using Error::Error;
};

// Transport-level failure while fetching remote metadata.
struct NetworkError : Error {
    using Error::Error;
};

}  // namespace frontier_audit
