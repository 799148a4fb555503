#pragma once

#include <stdexcept>
#include <string>

namespace itcs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Misuse of the command-line or registry surface (bad flag, unknown
/// problem/solver name, unparsable parameter). CLI exit code 1.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

/// Invalid input data: malformed datasets, violated type invariants,
/// dimension mismatches, unreadable or unwritable files. CLI exit code 2.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Numeric failure inside a solver (non-finite state or objective).
/// CLI exit code 3.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(what) {}
};

}  // namespace itcs
