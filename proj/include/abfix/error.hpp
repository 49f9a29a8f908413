#pragma once

#include <stdexcept>
#include <string>

namespace abfix {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Empty or malformed point set.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A distance, map, kernel or rhs produced a negative or non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// A self-map left its domain.
class ClosureError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// Constants violate the hypotheses of their contraction kind.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Contraction precondition (Lambda*(n-m) < 1, Lambda*h < 1) refused in strict mode.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, double factor)
        : Error(what), factor_(factor) {}
    double factor() const noexcept { return factor_; }

private:
    double factor_;
};

/// Residuals grew for several consecutive steps.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double measured_factor)
        : Error(what), measured_factor_(measured_factor) {}
    double measured_factor() const noexcept { return measured_factor_; }

private:
    double measured_factor_;
};

/// Problem-file syntax error; line is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Problem-file field outside its admissible range.
class ValidationError : public Error {
public:
    ValidationError(const std::string& field, const std::string& constraint)
        : Error(field + ": " + constraint), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace abfix
