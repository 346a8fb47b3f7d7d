#pragma once

// Virtual coherence experiments: pulse → evolve → measure → fit, end to end.
// Readout confusion is applied by default (the fits are offset-tolerant, so
// recovered time constants are SPAM-immune); shots = 0 yields exact reported
// probabilities, shots > 0 samples per-point with seeds split from the root.

#include <cstdint>
#include <vector>

#include "csfq/circuit.hpp"
#include "csfq/dynamics.hpp"
#include "csfq/fit.hpp"
#include "csfq/pulses.hpp"

namespace csfq::experiments {

struct DecayCurve {
    std::vector<double> delays_ns;
    std::vector<double> values;  // reported probabilities
    int shots = 0;               // 0 = exact
};

struct ExperimentOptions {
    pulses::GaussianShape pulse{20.0, 10.0, 0.0};
    double eta_ns = 0.0;
    bool ideal_readout = false;
    double dt_ns = dynamics::kDefaultDt;
    double detuning_mhz = 0.5;  // Ramsey frame advance
};

struct CoherenceResult {
    DecayCurve curve;
    fit::FitOutcome fit;
    double time_ns = 0.0;         // fitted T1 / T2 / T2_echo
    double time_stderr_ns = 0.0;
    double freq_mhz = 0.0;        // Ramsey only
    double freq_stderr_mhz = 0.0;
};

/// π pulse, wait τ, measure; exponential fit.
CoherenceResult t1_experiment(const dynamics::SystemModel& system,
                              const dynamics::NoiseModel& noise,
                              const std::vector<double>& delays_ns, int shots,
                              std::uint64_t seed, const ExperimentOptions& opts = {});

/// X/2 — wait τ — X/2 with frame-advance phase 2π·detuning·τ; damped-cosine fit.
CoherenceResult ramsey_experiment(const dynamics::SystemModel& system,
                                  const dynamics::NoiseModel& noise,
                                  const std::vector<double>& delays_ns, int shots,
                                  std::uint64_t seed, const ExperimentOptions& opts = {});

/// X/2 — τ/2 — X — τ/2 — X/2; exponential fit. Equals the Ramsey T2 under
/// this Markovian model.
CoherenceResult echo_experiment(const dynamics::SystemModel& system,
                                const dynamics::NoiseModel& noise,
                                const std::vector<double>& delays_ns, int shots,
                                std::uint64_t seed, const ExperimentOptions& opts = {});

/// 30 log-spaced delays spanning [0, 3×expected].
std::vector<double> default_delays_ns(double expected_ns, int points = 30,
                                      bool log_spaced = true);

struct SpectroscopyRow {
    double flux = 0.0;
    double w_ge_ghz = 0.0;
    double w_gf_ghz = 0.0;
};

/// Thin wrapper over circuit::flux_sweep emitting the two transition branches.
std::vector<SpectroscopyRow> spectroscopy(const circuit::CircuitParams& params,
                                          const std::vector<double>& flux_grid,
                                          const circuit::BasisConfig& basis);

}  // namespace csfq::experiments
