#pragma once

#include <stdexcept>
#include <string>

namespace nhsym {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Syntax error while parsing an expression. `offset` is the byte offset
/// into the source string where the problem was detected.
struct ParseError : Error {
    ParseError(std::size_t offset_, const std::string& what_)
        : Error("parse error at offset " + std::to_string(offset_) + ": " + what_),
          offset(offset_) {}
    std::size_t offset;
};

/// Numerical domain error during evaluation (sqrt of a negative number,
/// log of a non-positive number, division by zero, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Violated model assumption: singular or indefinite mass matrix,
/// rank-deficient constraint rows, ill-conditioned multiplier solve.
struct ModelError : Error {
    using Error::Error;
};

/// Integration failure: non-finite state, projection divergence.
struct IntegrationError : Error {
    using Error::Error;
};

/// Scenario file problem: missing key, arity mismatch, undeclared parameter.
struct ScenarioError : Error {
    using Error::Error;
};

} // namespace nhsym
