#pragma once

#include <stdexcept>
#include <string>

namespace vforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A profile or ansatz violates a structural invariant (coverage, sign, ordering).
class InvalidProfile : public Error {
public:
    using Error::Error;
};

/// A caller-side precondition does not hold (bad parameter range, empty grid, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A moment integral diverges (power of r not integrable at the origin or at infinity).
class DivergentMoment : public Error {
public:
    using Error::Error;
};

/// One of the factor integrals entering the normalization is zero or infinite.
class DegenerateFactor : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of its subdivision budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Base of the errors raised by zero-energy and threshold solves.
class SolverError : public Error {
public:
    using Error::Error;
};

/// The zero-energy quadratic in the halo weight has no positive root.
class NoPositiveRoot : public SolverError {
public:
    NoPositiveRoot(const std::string& what, double root_a, double root_b)
        : SolverError(what), roots_{root_a, root_b} {}
    double first_root() const { return roots_[0]; }
    double second_root() const { return roots_[1]; }

private:
    double roots_[2];
};

/// A scalar zero-energy equation has no bracketable root.
class NoRoot : public SolverError {
public:
    using SolverError::SolverError;
};

/// The spatial-momentum virial factor is too small for any angular cutoff to reach -1/2.
class UnreachableThreshold : public SolverError {
public:
    using SolverError::SolverError;
};

/// A parameter sweep found no grid point satisfying the request.
class GridExhausted : public SolverError {
public:
    using SolverError::SolverError;
};

/// Mollification ramps around two neighbouring breakpoints would intersect.
class RampOverlap : public Error {
public:
    RampOverlap(const std::string& what, double left_breakpoint, double right_breakpoint)
        : Error(what), left_(left_breakpoint), right_(right_breakpoint) {}
    double left_breakpoint() const { return left_; }
    double right_breakpoint() const { return right_; }

private:
    double left_;
    double right_;
};

/// Malformed run configuration or profile literal.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace vforge
