#pragma once

#include <stdexcept>
#include <string>

namespace mixts {

// Base for every error raised by the library. The CLI maps the two branches
// below onto exit codes 1 (ValidationError) and 2 (NumericError).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Bad user input: malformed files, out-of-range arguments.
class InputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A documented precondition of an operation is violated.
class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Simulation refused because the parameter fails its stability certificate.
class RefusalError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// The requested check exists only for a restricted parameter class.
class UnsupportedCheckError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class OverflowError : public NumericError {
public:
    using NumericError::NumericError;
};

class EstimationError : public NumericError {
public:
    using NumericError::NumericError;
};

class CovarianceUnavailableError : public NumericError {
public:
    using NumericError::NumericError;
};

class BootstrapError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace mixts
