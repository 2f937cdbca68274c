#pragma once

#include <stdexcept>
#include <string>

namespace hitop {

// Base for all simulator errors. Subclasses map to CLI exit codes:
// ConfigError -> 1, DataError -> 2, InternalError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad usage or invalid configuration (names the offending key/constraint).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input files, shape mismatches, out-of-range data.
class DataError : public Error {
public:
    using Error::Error;
};

// Broken internal invariant (a scheduler/engine bug, not user error).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace hitop
