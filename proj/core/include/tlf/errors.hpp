#pragma once

#include <stdexcept>
#include <string>

namespace tlf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or argument is outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operation has no closed form for the requested truncation family.
class UnsupportedFamilyError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An adaptive quadrature could not reach its tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// The integrand does not decay fast enough for the integral to exist.
class DivergentIntegralError : public QuadratureError {
public:
    using QuadratureError::QuadratureError;
};

/// A rejection loop exceeded its trial budget.
class IterationLimitError : public Error {
public:
    using Error::Error;
};

/// A result is not representable as a finite double.
class OverflowError : public Error {
public:
    using Error::Error;
};

}  // namespace tlf
