#pragma once

#include <stdexcept>
#include <string>

namespace carbonprice {

/// Input outside the mathematical domain of an operation (negative
/// coefficients, price above penalty, probability outside (0,1], ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A policy configuration admits no interior optimum or no clearing price.
/// `bound()` names the violated inequality so the CLI can report it.
class InfeasibleError : public DomainError {
public:
    InfeasibleError(std::string bound, const std::string& what)
        : DomainError(what), bound_(std::move(bound)) {}
    const std::string& bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

/// A root-finder failed to bracket or converge.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No penalty rate in the search range reaches the emissions target.
class CalibrationError : public SolverError {
public:
    CalibrationError(const std::string& what, double lowest, double highest)
        : SolverError(what), lowest_(lowest), highest_(highest) {}
    double lowest_achievable() const noexcept { return lowest_; }
    double highest_achievable() const noexcept { return highest_; }

private:
    double lowest_;
    double highest_;
};

/// Malformed or invalid scenario document.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace carbonprice
