#pragma once

#include <stdexcept>
#include <string>

namespace seedlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed configuration, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// All sites coincide with some center; the D^2 distribution is undefined.
class DegeneratePotential : public Error {
public:
    DegeneratePotential() : Error("total potential is zero; D^2 distribution undefined") {}
};

/// An exact-enumeration call would exceed its outcome budget. Never silently
/// approximated; the caller must raise the budget or shrink the instance.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Malformed dataset or config file. Carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line)
        : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Filesystem failures while reading or writing experiment outputs.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace seedlab
