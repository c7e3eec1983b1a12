#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature, bisection, or overflow failure; message carries diagnostics
/// (achieved tolerance, bracket state, best value so far).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A structural hypothesis on the generator failed (for operations that
/// require it up front, e.g. exponent extraction). Named inequality is in
/// the message. Reporting paths never throw this; they return booleans.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Degenerate input: identically-zero direction, empty table, bad scaling
/// target, and similar precondition violations.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A requested manifold branch has no root along the given ray, or a field
/// claimed to lie on the manifold does not.
class ProjectionError : public Error {
public:
    using Error::Error;
};

/// Field/mesh shape disagreement (node counts, dimension, extents).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// File I/O failure (missing file, malformed field data).
class IoError : public Error {
public:
    using Error::Error;
};

/// Config parse or validation failure; carries the offending line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace nehari
