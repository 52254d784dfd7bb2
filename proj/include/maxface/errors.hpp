#pragma once

#include <stdexcept>
#include <string>

namespace maxface {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters or inputs outside their documented range.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its target.
class NumericalError : public Error {
public:
    using Error::Error;
};

class BranchPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ContinuationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Quadrature that ran out of refinement levels. Carries the last estimate.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double last_estimate, double last_error)
        : NumericalError(what), estimate(last_estimate), error_estimate(last_error) {}
    double estimate;
    double error_estimate;
};

} // namespace maxface
