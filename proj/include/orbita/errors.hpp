#ifndef ORBITA_ERRORS_HPP
#define ORBITA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace orbita {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A constructor or factory argument violates its stated bound.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside the open radial domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The effective potential has no interior minimum for this L.
class NoMinimumError : public Error {
public:
    using Error::Error;
};

/// The center exists but W''(s0) <= 0, so the well is degenerate.
class DegenerateCenterError : public Error {
public:
    using Error::Error;
};

/// A root solve, quadrature refinement, or Newton iteration failed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The requested (n,k) ratio lies outside the solvable interval.
class InadmissibleRatioError : public Error {
public:
    using Error::Error;
};

/// The trajectory entered the collision guard radius.
class CollisionError : public Error {
public:
    using Error::Error;
};

/// A trajectory does not contain enough pericenter passages to measure.
class InsufficientEventsError : public Error {
public:
    using Error::Error;
};

/// A torus or orbit failed its dynamical verification.
class VerificationError : public Error {
public:
    using Error::Error;
};

} // namespace orbita

#endif
