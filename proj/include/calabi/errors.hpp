#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace calabi {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed DSL input; `offset` is the byte position of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

// Evaluation left the domain of a subexpression (ln of non-positive value,
// division by zero). `subexpression` is a rendering of the offending node.
class DomainError : public Error {
public:
    DomainError(const std::string& message, std::string subexpression)
        : Error(message + " in subexpression " + subexpression),
          subexpression(std::move(subexpression)) {}
    std::string subexpression;
};

// A Hessian that is not symmetric positive definite; the point lies outside
// the strict-convexity domain.
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& message, double min_eigenvalue)
        : Error(message + " (smallest eigenvalue ~ " + std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

// A matrix family violates the pairwise-commutation precondition.
class CommutatorError : public Error {
public:
    using Error::Error;
};

// An iterative routine failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, double residual)
        : Error(message + " (residual " + std::to_string(residual) + ")"),
          residual(residual) {}
    double residual;
};

// A mu-spectrum that fits none of the case patterns C_0..C_n.
class PatternMismatch : public Error {
public:
    PatternMismatch(const std::string& message, std::vector<double> spectrum)
        : Error(message), spectrum(std::move(spectrum)) {}
    std::vector<double> spectrum;
};

// Invalid parameters (non-positive catalog constants, singular affine block, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace calabi
