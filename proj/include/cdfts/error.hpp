#pragma once

#include <stdexcept>
#include <string>

namespace cdfts {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's precondition (bad λ, k out of range, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The data makes an estimate undefined, e.g. duplicate points giving a zero
/// k-NN radius. Callers usually react by deduplicating or jittering.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// File missing or unreadable / unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV content. Row and column are 1-based and refer to the file
/// (row 1 is the header); zero means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

} // namespace cdfts
