#pragma once

// Exception hierarchy. Each error carries a category that the CLI maps onto
// its exit code.

#include <stdexcept>
#include <string>
#include <vector>

namespace alphacomp {

enum class ErrorCategory { io = 2, domain = 3, convergence = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Argument outside the domain of a transform, density or estimator.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

// A finite input produced an overflow or total underflow.
class NumericalRangeError : public Error {
public:
    NumericalRangeError(const std::string& what, std::size_t component)
        : Error(ErrorCategory::domain, what), component_(component) {}

    std::size_t component() const noexcept { return component_; }

private:
    std::size_t component_;
};

// Replicated rows: residual-based estimators have nothing to work with.
class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

// Iterative solver gave up. Keeps the last iterate for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double gradient_norm)
        : Error(ErrorCategory::convergence, what),
          last_iterate_(std::move(last_iterate)),
          gradient_norm_(gradient_norm) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    std::vector<double> last_iterate_;
    double gradient_norm_;
};

// All inner fits failed, or an outer search has nothing to return.
class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(ErrorCategory::convergence, what) {}
};

} // namespace alphacomp
