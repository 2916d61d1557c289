#pragma once

#include <stdexcept>
#include <string>

namespace cqt {

// Invalid arguments or inconsistent inputs (bad m, mismatched lengths, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A bath with zero reorganization energy (or W = sum T_v xi_v = 0) where a
// Gaussian kernel is required.
class SingularBathError : public DomainError {
public:
    using DomainError::DomainError;
};

// Iterations that did not converge, quadrature that missed its target, etc.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Some kappa underflowed to zero, so the ladder splits into disconnected blocks.
class DisconnectedLadderError : public NumericalError {
public:
    DisconnectedLadderError(const std::string& what, double link_m)
        : NumericalError(what), link_m_(link_m) {}
    double link_m() const noexcept { return link_m_; }

private:
    double link_m_;
};

// The objective has no interior maximum on the search grid; `argmax` is the
// boundary grid point where the largest value sits.
class MonotoneObjectiveError : public NumericalError {
public:
    MonotoneObjectiveError(const std::string& what, double argmax)
        : NumericalError(what), argmax_(argmax) {}
    double argmax() const noexcept { return argmax_; }

private:
    double argmax_;
};

// Malformed or incomplete run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cqt
