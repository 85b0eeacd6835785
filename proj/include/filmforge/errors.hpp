#pragma once

#include <stdexcept>
#include <string>

namespace filmforge {

// Base for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (CSV, JSON). Carries a line number where known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Data or configuration violates a documented invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Requested wavelength outside a material's tabulated range.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

// Non-finite intermediate value or diverging optimization.
class NumericError : public Error {
public:
    using Error::Error;
};

// Caller broke an API precondition (wrong dimension, foreign action, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace filmforge
