#pragma once

#include <stdexcept>
#include <string>

namespace kdl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument value (zero direction, bad step size, unknown builtin...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Point does not satisfy a domain precondition (e.g. not on the boundary).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Boundary root bracketing or projection failed.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Phase point on (or numerically at) the grazing set.
class GrazingError : public Error {
public:
    using Error::Error;
};

/// Specular cycle exceeded its reflection cap.
class RunawayError : public Error {
public:
    using Error::Error;
};

/// Finite-difference stencil straddles a reflection-count discontinuity.
class DiscontinuityError : public Error {
public:
    DiscontinuityError(const std::string& what, double tau) : Error(what), tau_(tau) {}
    /// Reparametrized time of the offending breakpoint.
    double tau() const { return tau_; }

private:
    double tau_;
};

/// A test function or study input violates its admissibility contract.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Particle found outside the domain after transport.
class IntegrationError : public Error {
public:
    using Error::Error;
};

}  // namespace kdl
