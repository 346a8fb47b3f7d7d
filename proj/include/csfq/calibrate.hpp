#pragma once

// Gate calibration by error amplification: Rabi amplitude seeding, repeated-
// gate amplitude refinement (the m ≡ 1 mod 4 schedule puts the ideal outcome
// on the steepest point of the fringe, so amplitude error accumulates
// linearly in m), and DRAG coefficient scanning on alternating ±X/2 pairs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csfq/dynamics.hpp"
#include "csfq/pulses.hpp"

namespace csfq::calibrate {

struct CalibrationResult {
    std::string parameter;          // "amplitude" or "eta"
    double optimal = 0.0;
    bool boundary = false;          // optimum pinned to the scanned edge
    std::string warning;            // e.g. flat objective
    std::vector<double> grid;       // last scan grid
    std::vector<double> objective;  // objective over that grid
    std::vector<int> reps_used;     // repetition counts per stage
};

struct CalibrationOptions {
    pulses::GaussianShape pulse{20.0, 10.0, 0.0};
    double carrier_ghz = 0.0;  // 0 → resonant with w_ge
    double dt_ns = dynamics::kDefaultDt;
};

/// One pulse per amplitude, P_e maximized; coarse seed for the π amplitude.
CalibrationResult rabi_scan(const dynamics::SystemModel& system,
                            const dynamics::NoiseModel* noise,
                            std::span<const double> amplitude_grid,
                            const CalibrationOptions& opts = {});

/// Error-amplified X/2 amplitude: for each m in the schedule, scan a
/// shrinking window and minimize |P_e − 1/2| after m repetitions.
CalibrationResult amplify_amplitude(const dynamics::SystemModel& system,
                                    const dynamics::NoiseModel* noise, double initial_amplitude,
                                    std::span<const int> reps_schedule, double shrink_factor,
                                    double eta_ns, const CalibrationOptions& opts = {});

/// DRAG coefficient scan: alternating (X/2, −X/2) pairs repeated `reps`
/// times, objective = deviation of the final state from |g⟩ (leakage plus
/// phase error in one scalar); parabolic refinement around the grid minimum.
CalibrationResult calibrate_drag(const dynamics::SystemModel& system,
                                 const dynamics::NoiseModel* noise, double amp_half,
                                 std::span<const double> eta_grid, int reps,
                                 const CalibrationOptions& opts = {});

/// Calibrated single-qubit gate parameters shared by benchmarking.
struct GateCalibration {
    double amp_half = 0.0;  // ±X/2, ±Y/2 amplitude
    double amp_full = 0.0;  // X, Y amplitude
    double eta_ns = 0.0;
    double carrier_ghz = 0.0;
    pulses::GaussianShape pulse{20.0, 10.0, 0.0};

    pulses::GateSpec spec_for(pulses::PhysGate gate) const {
        return pulses::to_gate_spec(gate, amp_half, amp_full, eta_ns);
    }
};

struct PipelineReport {
    GateCalibration calibration;
    CalibrationResult rabi;
    CalibrationResult amplitude;
    CalibrationResult drag;
    CalibrationResult amplitude_refined;  // second pass at η*
    CalibrationResult amplitude_full;     // X amplitude stages
};

/// Full pipeline: rabi_scan → amplify_amplitude → calibrate_drag → amplitude
/// re-trim at η*, then the π amplitude by the same error amplification with
/// an X/2 prefix to restore the steep fringe point.
PipelineReport calibrate_gates(const dynamics::SystemModel& system,
                               const dynamics::NoiseModel* noise,
                               std::span<const int> reps_schedule,
                               const CalibrationOptions& opts = {});

}  // namespace csfq::calibrate
