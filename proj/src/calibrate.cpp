#include "csfq/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "csfq/errors.hpp"
#include "csfq/linalg.hpp"
#include "csfq/parallel.hpp"

namespace csfq::calibrate {

namespace {

constexpr double kPi = 3.14159265358979323846;

using dynamics::CMat;
using linalg::Superop;

double carrier_of(const dynamics::SystemModel& system, const CalibrationOptions& opts) {
    return opts.carrier_ghz > 0.0 ? opts.carrier_ghz : system.w_ge_ghz;
}

// P(e) from |g⟩ after applying `power` repetitions of the gate map
double excited_after(const dynamics::SystemModel& system, const dynamics::NoiseModel* noise,
                     const pulses::GateSpec& gate, int power, double carrier,
                     const CalibrationOptions& opts) {
    const Superop s = dynamics::gate_superop(system, noise, gate, carrier, opts.pulse, opts.dt_ns);
    CMat rho(system.dims);
    rho(0, 0) = 1.0;
    for (int i = 0; i < power; ++i) rho = s.apply_to(rho);
    return 1.0 - std::clamp(rho(0, 0).real(), 0.0, 1.0);
}

// Deviation of the final state from |g⟩ after `reps` ±X/2 pairs whose order
// alternates, (a,b),(b,a),(a,b),…: the reversed pairs echo the coherent
// phase error the rotations convert, leaving leakage as the dominant signal.
double pair_deviation(const dynamics::SystemModel& system, const dynamics::NoiseModel* noise,
                      const pulses::GateSpec& a, const pulses::GateSpec& b, int reps,
                      double carrier, const CalibrationOptions& opts) {
    const Superop sa = dynamics::gate_superop(system, noise, a, carrier, opts.pulse, opts.dt_ns);
    const Superop sb = dynamics::gate_superop(system, noise, b, carrier, opts.pulse, opts.dt_ns);
    CMat rho(system.dims);
    rho(0, 0) = 1.0;
    for (int i = 0; i < reps; ++i) {
        const Superop& first = (i % 2 == 0) ? sa : sb;
        const Superop& second = (i % 2 == 0) ? sb : sa;
        rho = first.apply_to(rho);
        rho = second.apply_to(rho);
    }
    return 1.0 - std::clamp(rho(0, 0).real(), 0.0, 1.0);
}

// minimum of the parabola through three points; falls back to the middle
double parabolic_min(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (y2 - y0) / (x2 - x0);
    const double d2 = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
    if (!(d2 > 0.0)) return x1;
    const double x = 0.5 * (x0 + x2) - 0.5 * d1 / d2;
    return std::clamp(x, std::min(x0, x2), std::max(x0, x2));
}

}  // namespace

CalibrationResult rabi_scan(const dynamics::SystemModel& system,
                            const dynamics::NoiseModel* noise,
                            std::span<const double> amplitude_grid,
                            const CalibrationOptions& opts) {
    if (amplitude_grid.empty()) throw ConfigError("rabi_scan: empty grid");
    for (std::size_t i = 1; i < amplitude_grid.size(); ++i)
        if (!(amplitude_grid[i] > amplitude_grid[i - 1]))
            throw ConfigError("rabi_scan: grid must be increasing");

    const double carrier = carrier_of(system, opts);
    CalibrationResult result;
    result.parameter = "amplitude";
    result.grid.assign(amplitude_grid.begin(), amplitude_grid.end());
    result.objective.resize(amplitude_grid.size());
    parallel::parallel_for(amplitude_grid.size(), [&](std::size_t i) {
        const pulses::GateSpec gate{pulses::Axis::X, kPi, 0.0, amplitude_grid[i]};
        result.objective[i] = excited_after(system, noise, gate, 1, carrier, opts);
    });

    const auto best = std::max_element(result.objective.begin(), result.objective.end());
    const auto idx = static_cast<std::size_t>(best - result.objective.begin());
    result.optimal = result.grid[idx];
    result.boundary = idx == 0 || idx + 1 == result.grid.size();
    const auto [lo, hi] = std::minmax_element(result.objective.begin(), result.objective.end());
    if (*hi - *lo <= 1e-12) {
        result.warning = "flat objective: excited population insensitive to amplitude";
        result.boundary = true;
    }
    return result;
}

CalibrationResult amplify_amplitude(const dynamics::SystemModel& system,
                                    const dynamics::NoiseModel* noise, double initial_amplitude,
                                    std::span<const int> reps_schedule, double shrink_factor,
                                    double eta_ns, const CalibrationOptions& opts) {
    if (reps_schedule.empty()) throw ConfigError("amplify_amplitude: empty schedule");
    for (std::size_t i = 0; i < reps_schedule.size(); ++i) {
        if (reps_schedule[i] % 4 != 1)
            throw ConfigError("amplify_amplitude: repetition counts must be ≡ 1 mod 4");
        if (i > 0 && reps_schedule[i] <= reps_schedule[i - 1])
            throw ConfigError("amplify_amplitude: schedule must be increasing");
    }
    if (!(initial_amplitude > 0.0)) throw ConfigError("amplify_amplitude: bad initial amplitude");
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0))
        throw ConfigError("amplify_amplitude: shrink factor must lie in (0,1)");

    const double carrier = carrier_of(system, opts);
    constexpr int kScanPoints = 11;

    CalibrationResult result;
    result.parameter = "amplitude";
    double center = initial_amplitude;
    double width = 0.03 * initial_amplitude;
    int boundary_streak = 0;

    for (int rep : reps_schedule) {
        result.reps_used.push_back(rep);
        std::vector<double> grid(kScanPoints), objective(kScanPoints);
        for (int i = 0; i < kScanPoints; ++i)
            grid[static_cast<std::size_t>(i)] =
                center - width + 2.0 * width * i / (kScanPoints - 1);
        parallel::parallel_for(grid.size(), [&](std::size_t i) {
            const pulses::GateSpec gate{pulses::Axis::X, kPi / 2.0, eta_ns, grid[i]};
            // (X/2)^m with m ≡ 1 mod 4 ideally lands on P_e = 1/2
            objective[i] =
                std::abs(excited_after(system, noise, gate, rep, carrier, opts) - 0.5);
        });

        const auto best = std::min_element(objective.begin(), objective.end());
        const auto idx = static_cast<std::size_t>(best - objective.begin());
        if (idx == 0 || idx + 1 == grid.size()) {
            if (++boundary_streak >= 2)
                throw CalibrationError(
                    "amplify_amplitude: optimum pinned at the scan boundary twice in a row");
            center = grid[idx];  // recenter and retry with the same width
        } else {
            boundary_streak = 0;
            center = parabolic_min(grid[idx - 1], objective[idx - 1], grid[idx], objective[idx],
                                   grid[idx + 1], objective[idx + 1]);
            width *= shrink_factor;
        }
        result.grid = grid;
        result.objective = objective;
    }

    result.optimal = center;
    result.boundary = boundary_streak > 0;
    return result;
}

CalibrationResult calibrate_drag(const dynamics::SystemModel& system,
                                 const dynamics::NoiseModel* noise, double amp_half,
                                 std::span<const double> eta_grid, int reps,
                                 const CalibrationOptions& opts) {
    if (eta_grid.size() < 3) throw ConfigError("calibrate_drag: need at least 3 grid points");
    for (std::size_t i = 1; i < eta_grid.size(); ++i)
        if (!(eta_grid[i] > eta_grid[i - 1]))
            throw ConfigError("calibrate_drag: grid must be increasing");
    if (!(eta_grid.front() < 0.0 && eta_grid.back() > 0.0))
        throw ConfigError("calibrate_drag: grid must span both signs");
    if (reps < 1) throw ConfigError("calibrate_drag: reps must be >= 1");

    const double carrier = carrier_of(system, opts);
    CalibrationResult result;
    result.parameter = "eta";
    result.reps_used.push_back(reps);
    result.grid.assign(eta_grid.begin(), eta_grid.end());
    result.objective.resize(eta_grid.size());
    parallel::parallel_for(eta_grid.size(), [&](std::size_t i) {
        const pulses::GateSpec plus{pulses::Axis::X, kPi / 2.0, eta_grid[i], amp_half};
        const pulses::GateSpec minus{pulses::Axis::X, -kPi / 2.0, eta_grid[i], amp_half};
        result.objective[i] = pair_deviation(system, noise, plus, minus, reps, carrier, opts);
    });

    const auto best = std::min_element(result.objective.begin(), result.objective.end());
    const auto idx = static_cast<std::size_t>(best - result.objective.begin());
    result.boundary = idx == 0 || idx + 1 == result.grid.size();
    const auto [lo, hi] = std::minmax_element(result.objective.begin(), result.objective.end());
    if (*hi - *lo <= 1e-7) {
        result.warning = "flat objective: no leakage level to correct (eta-insensitive)";
        result.optimal = 0.0;
        return result;
    }
    if (result.boundary) {
        result.optimal = result.grid[idx];
        return result;
    }

    // iterated local scans shrink the bracket before the final parabola; the
    // valley is steep and asymmetric, so one wide-spaced parabola is biased
    const pulses::GateSpec minus_tpl{pulses::Axis::X, -kPi / 2.0, 0.0, amp_half};
    auto eval = [&](double eta) {
        const pulses::GateSpec plus{pulses::Axis::X, kPi / 2.0, eta, amp_half};
        const pulses::GateSpec minus{pulses::Axis::X, -kPi / 2.0, eta, amp_half};
        return pair_deviation(system, noise, plus, minus, reps, carrier, opts);
    };
    double center = result.grid[idx];
    double step = result.grid[idx] - result.grid[idx - 1];
    for (int round = 0; round < 3; ++round) {
        step *= 0.5;
        const double xs[3] = {center - step, center, center + step};
        const double ys[3] = {eval(xs[0]), eval(xs[1]), eval(xs[2])};
        const auto local = std::min_element(ys, ys + 3);
        center = xs[local - ys];
        if (local == ys + 1)
            center = parabolic_min(xs[0], ys[0], xs[1], ys[1], xs[2], ys[2]);
    }
    result.optimal = center;
    return result;
}

PipelineReport calibrate_gates(const dynamics::SystemModel& system,
                               const dynamics::NoiseModel* noise,
                               std::span<const int> reps_schedule,
                               const CalibrationOptions& opts) {
    PipelineReport report;
    const double carrier = carrier_of(system, opts);

    // coarse Rabi seed around the pulse-area prediction for θ = π
    const double area_amp =
        pulses::amplitude_for_angle(kPi, pulses::Shape{opts.pulse});
    std::vector<double> rabi_grid;
    for (int i = 0; i < 25; ++i) rabi_grid.push_back(area_amp * (0.5 + i * (1.5 / 24.0)));
    report.rabi = rabi_scan(system, noise, rabi_grid, opts);

    report.amplitude = amplify_amplitude(system, noise, report.rabi.optimal / 2.0, reps_schedule,
                                         0.25, 0.0, opts);

    std::vector<double> eta_grid;
    for (int i = 0; i < 37; ++i) eta_grid.push_back(-0.45 + i * 0.025);
    report.drag =
        calibrate_drag(system, noise, report.amplitude.optimal, eta_grid, 4, opts);

    // amplitude re-trim at the calibrated η
    report.amplitude_refined = amplify_amplitude(system, noise, report.amplitude.optimal,
                                                 reps_schedule, 0.25, report.drag.optimal, opts);

    // π amplitude by the same machinery: an X/2 prefix puts (X)^m back on the
    // steep half-fringe, restoring a signed, linearly amplified error
    report.amplitude_full = [&] {
        const double seed_amp = 2.0 * report.amplitude_refined.optimal;
        CalibrationResult res;
        res.parameter = "amplitude";
        double center = seed_amp;
        double width = 0.03 * seed_amp;
        int boundary_streak = 0;
        constexpr int kScanPoints = 11;
        for (int rep : reps_schedule) {
            const int m = rep / 2;  // (X/2)(X)^m accumulates like m full flips
            if (m < 1) continue;
            res.reps_used.push_back(m);
            std::vector<double> grid(kScanPoints), objective(kScanPoints);
            for (int i = 0; i < kScanPoints; ++i)
                grid[static_cast<std::size_t>(i)] =
                    center - width + 2.0 * width * i / (kScanPoints - 1);
            parallel::parallel_for(grid.size(), [&](std::size_t i) {
                const pulses::GateSpec half{pulses::Axis::X, kPi / 2.0, report.drag.optimal,
                                            report.amplitude_refined.optimal};
                const pulses::GateSpec full{pulses::Axis::X, kPi, report.drag.optimal, grid[i]};
                const Superop sh = dynamics::gate_superop(system, noise, half, carrier,
                                                          opts.pulse, opts.dt_ns);
                const Superop sf = dynamics::gate_superop(system, noise, full, carrier,
                                                          opts.pulse, opts.dt_ns);
                CMat rho(system.dims);
                rho(0, 0) = 1.0;
                rho = sh.apply_to(rho);
                for (int r = 0; r < m; ++r) rho = sf.apply_to(rho);
                objective[i] = std::abs(1.0 - std::clamp(rho(0, 0).real(), 0.0, 1.0) - 0.5);
            });
            const auto best = std::min_element(objective.begin(), objective.end());
            const auto idx = static_cast<std::size_t>(best - objective.begin());
            if (idx == 0 || idx + 1 == grid.size()) {
                if (++boundary_streak >= 2)
                    throw CalibrationError(
                        "calibrate_gates: π amplitude pinned at the scan boundary");
                center = grid[idx];
            } else {
                boundary_streak = 0;
                center = parabolic_min(grid[idx - 1], objective[idx - 1], grid[idx],
                                       objective[idx], grid[idx + 1], objective[idx + 1]);
                width *= 0.25;
            }
            res.grid = grid;
            res.objective = objective;
        }
        res.optimal = center;
        return res;
    }();

    report.calibration.amp_half = report.amplitude_refined.optimal;
    report.calibration.amp_full = report.amplitude_full.optimal;
    report.calibration.eta_ns = report.drag.optimal;
    report.calibration.carrier_ghz = carrier;
    report.calibration.pulse = opts.pulse;
    return report;
}

}  // namespace csfq::calibrate
