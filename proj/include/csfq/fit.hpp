#pragma once

// Shared nonlinear least-squares engine (damped Gauss–Newton with analytic
// Jacobians) for the three decay models used across the toolkit. Standard
// errors come from the covariance matrix: σ̂²(JᵀJ)⁻¹ with the reduced
// chi-square estimate when unweighted, (JᵀWJ)⁻¹ unscaled with weights.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csfq::fit {

struct FitOutcome {
    std::string model;
    std::vector<double> params;
    std::vector<double> stderrs;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string warning;  // non-empty when the result is flagged

    bool flagged() const { return !warning.empty(); }
};

/// y = A·exp(−x/T) + C, params [A, T, C]. T kept positive via an internal
/// log transform; reported values and errors are in original coordinates.
FitOutcome fit_exponential(std::span<const double> x, std::span<const double> y,
                           std::span<const double> weights = {},
                           std::optional<std::vector<double>> initial = std::nullopt);

/// y = A·exp(−x/T2)·cos(2πf·x + φ0) + C, params [A, T2, f, phi0, C].
/// Frequency seeded from a least-squares periodogram; if no oscillation is
/// resolved over the span the fit falls back to the exponential model and
/// reports f = 0 with a warning.
FitOutcome fit_damped_cosine(std::span<const double> x, std::span<const double> y,
                             std::optional<std::vector<double>> initial = std::nullopt);

/// y = A·p^m + B, params [A, p, B]. p constrained to (0,1) by an internal
/// logit transform; a p pinned at either bound is flagged.
FitOutcome fit_rb_decay(std::span<const double> m, std::span<const double> y,
                        std::span<const double> weights = {},
                        std::optional<std::vector<double>> initial = std::nullopt);

}  // namespace csfq::fit
