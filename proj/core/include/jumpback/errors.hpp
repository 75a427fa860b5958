#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jumpback {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad tempo range, shape mismatch, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The filter reached a state with no probability mass left to normalize.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// Frames fed to a tracker out of order or with gaps.
class SequencingError : public Error {
public:
    using Error::Error;
};

/// File-level structure problem: bad header, row count mismatch, unreadable path.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A single malformed row. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace jumpback
