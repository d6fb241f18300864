#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range argument (non-finite scale, bad mesh, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A mass at or beyond the critical value 8*pi where the bubble scale diverges.
class CriticalMassError : public Error {
public:
    using Error::Error;
};

/// Two fields that must share a discretization do not.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// A hypothesis of an operation does not hold for the given data.
class PreconditionFailed : public Error {
public:
    using Error::Error;
};

/// Configuration or field file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace mfl
