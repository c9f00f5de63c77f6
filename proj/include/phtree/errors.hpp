#pragma once

#include <stdexcept>
#include <string>

namespace phtree {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (arity, shape, mismatched m).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Invalid parameter values (alpha + beta != 1, m < 2, delta outside (0,1)).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An argument outside the mathematical domain, e.g. t outside [0,1].
class DomainError : public Error {
public:
    using Error::Error;
};

/// Level size m^k above the configured cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Operation needs metadata the input does not carry.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A value oracle had no value for a required vertex.
class MissingValueError : public Error {
public:
    using Error::Error;
};

/// Requested resolution is deeper than the subset's trusted depth.
class InsufficientDepthError : public Error {
public:
    using Error::Error;
};

/// Malformed textual input (descriptors, CSV, digit strings).
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace phtree
