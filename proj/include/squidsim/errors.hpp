#pragma once

#include <stdexcept>
#include <string>

namespace squid {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical parameters outside their domain (C <= 0, negative temperature...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operator or state arguments that violate a precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A state does not fit inside the truncated Fock space.
class TruncationError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Sampling grid too coarse or not covering the state.
class GridError : public Error {
public:
    using Error::Error;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, long first_dim, long second_dim)
        : Error(what), first_dim_(first_dim), second_dim_(second_dim) {}

    long first_dim() const noexcept { return first_dim_; }
    long second_dim() const noexcept { return second_dim_; }

private:
    long first_dim_;
    long second_dim_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace squid
