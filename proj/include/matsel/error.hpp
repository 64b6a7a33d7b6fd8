#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matsel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value does not type-check against its property definition.
class InvalidValue : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation's precondition (empty requirement, length mismatch, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Input lies outside a metric's mathematical domain (non-positive entries, zero variance).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parse/validation failure while loading a text resource. `line()` is 1-based, 0 if unknown.
class LoadError : public Error {
public:
    LoadError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// No knowledgebase rule fired for a requirement.
class Unclassifiable : public Error {
public:
    using Error::Error;
};

/// Nothing left to rank: empty fragment, or every row excluded by metric preconditions.
class NoCandidates : public Error {
public:
    using Error::Error;
};

}  // namespace matsel
