#pragma once

#include <stdexcept>
#include <string>

namespace csfq {

/// Bad user input: config files, CLI arguments, invalid parameter sets.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical solver failure (diagonalization, propagation, parameter fits
/// of the circuit model). Carries the residual that triggered it.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg, double residual = 0.0)
        : std::runtime_error(msg), residual(residual) {}
    double residual;
};

/// Nonlinear least-squares failure that the caller chose not to tolerate.
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Gate calibration did not converge (e.g. optimum pinned at a scan edge).
struct CalibrationError : std::runtime_error {
    explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace csfq
