#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qrecur {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data (grid shape, curve layout, file syntax).
class InputShapeError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain an operation accepts.
class RangeError : public Error {
public:
    using Error::Error;
};

// A numerical procedure ran but could not certify its answer.
class NumericalQualityError : public Error {
public:
    NumericalQualityError(const std::string& what, double best_estimate)
        : Error(what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

// Two Mathieu branches tie on their weight at m = 0 and disagree in value.
class DegeneracyError : public NumericalQualityError {
public:
    DegeneracyError(const std::string& what, double first, double second)
        : NumericalQualityError(what, first), candidates_{first, second} {}
    const std::vector<double>& candidates() const noexcept { return candidates_; }

private:
    std::vector<double> candidates_;
};

// Truncated basis kept growing without converging.
class ResourceError : public NumericalQualityError {
public:
    using NumericalQualityError::NumericalQualityError;
};

// Finite-difference stencil crossed a branch degeneracy.
class StencilError : public NumericalQualityError {
public:
    using NumericalQualityError::NumericalQualityError;
};

// The parameters fall into a regime the operation has no formula for (zeta = 0).
class UnsupportedRegimeError : public Error {
public:
    using Error::Error;
};

// Packet weight at the basis edge exceeds the truncation-safety bound.
class BasisSizeError : public Error {
public:
    BasisSizeError(const std::string& what, int suggested_half_bandwidth)
        : Error(what), suggested_(suggested_half_bandwidth) {}
    int suggested_half_bandwidth() const noexcept { return suggested_; }

private:
    int suggested_;
};

// Not enough early recurrence peaks to measure a classical period.
class ClassicalPeriodUnresolved : public Error {
public:
    using Error::Error;
};

// Bad configuration file or command line.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace qrecur
