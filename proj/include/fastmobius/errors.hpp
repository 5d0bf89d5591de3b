#pragma once

#include <stdexcept>
#include <string>

namespace fastmobius {

/// Base of every error thrown by the library. The CLI maps each subclass to
/// a stable exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments or an invalid combination of options (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Request exceeds what the lattice machinery can hold, e.g. n >= 6 (exit code 3).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Invalid input data: malformed antichains, bad pmfs, corrupt files (exit code 4).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace fastmobius
