#pragma once

#include <stdexcept>
#include <string>

namespace capstek {

// Base class for every failure raised by the library. The CLI maps these to
// exit code 1 and prints `kind()` in the structured error object.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

// Parameter outside its documented range.
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "InvalidArgument"; }
};

// The metric fails lambda_0^D > alpha; the Steklov quotient is unbounded below.
class NotAdmissible : public Error {
public:
    NotAdmissible(const std::string& what, double gap) : Error(what), gap_(gap) {}
    const char* kind() const noexcept override { return "NotAdmissible"; }
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

// A numerical method did not converge or a factorization broke down.
class SolverFailure : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "SolverFailure"; }
};

// Derivative of a multiple eigenvalue requested along a direction that splits
// the cluster.
class AmbiguousDerivative : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "AmbiguousDerivative"; }
};

}  // namespace capstek
