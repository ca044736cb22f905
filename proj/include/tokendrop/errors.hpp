#pragma once

#include <stdexcept>
#include <string>

namespace tokendrop {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter combinations a generator cannot honor.
class InvalidParameters : public Error {
public:
    using Error::Error;
};

// Instance text that cannot be parsed; carries a 1-based line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// A structurally well-formed value that breaks an instance invariant.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// Randomized construction exhausted its retry budget.
class GenerationFailure : public Error {
public:
    using Error::Error;
};

// Exhaustive oracle asked to enumerate beyond its budget.
class TooLarge : public Error {
public:
    using Error::Error;
};

// Engine-detected node program bug (double consume, send on dead port, ...).
class SimBug : public Error {
public:
    using Error::Error;
};

}  // namespace tokendrop
