#pragma once

#include <stdexcept>
#include <string>

namespace perslab {

// ComputeError groups everything a numerical module can raise; ConfigError and
// IoError sit beside it so the CLI can map them to distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ComputeError : public Error {
public:
    using Error::Error;
};

class DomainError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class PoleError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class ConvergenceError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class QuadratureError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class SingularityError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class EmbeddingError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class FitError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class DegenerateError : public ComputeError {
public:
    DegenerateError(const std::string& what, double largest_usable)
        : ComputeError(what), largest_usable_horizon(largest_usable) {}

    // NaN when not even the first horizon had a survivor.
    double largest_usable_horizon;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace perslab
