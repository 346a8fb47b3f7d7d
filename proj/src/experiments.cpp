#include "csfq/experiments.hpp"

#include <cmath>

#include "csfq/errors.hpp"
#include "csfq/parallel.hpp"
#include "csfq/rng.hpp"

namespace csfq::experiments {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using dynamics::CMat;
using linalg::Superop;

void check_delays(const std::vector<double>& delays) {
    if (delays.empty()) throw ConfigError("experiment: empty delay grid");
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (!(delays[i] >= 0.0)) throw ConfigError("experiment: delays must be >= 0");
        if (i > 0 && !(delays[i] > delays[i - 1]))
            throw ConfigError("experiment: delays must be strictly increasing");
    }
}

dynamics::NoiseModel effective_noise(const dynamics::NoiseModel& noise,
                                     const ExperimentOptions& opts) {
    dynamics::NoiseModel n = noise;
    if (opts.ideal_readout) n.confusion = dynamics::Confusion::ideal();
    return n;
}

// superoperator of one pulse with an explicit drive phase
Superop pulse_superop(const dynamics::SystemModel& system, const dynamics::NoiseModel& noise,
                      const pulses::Shape& shape, double phase_rad, double carrier_ghz,
                      double dt_ns) {
    pulses::PulseProgram program;
    program.segments.push_back({shape, phase_rad, carrier_ghz, 0.0});
    program.duration_ns = pulses::shape_length_ns(shape);
    return dynamics::program_superop(system, &noise, program, dt_ns);
}

double reported_excited(const CMat& rho, const dynamics::NoiseModel& noise) {
    return dynamics::measure(rho, noise).p_report_e;
}

double maybe_sample(double p, int shots, std::uint64_t seed, std::uint64_t point_index) {
    if (shots <= 0) return p;
    const double probs[2] = {p, 1.0 - p};
    const auto counts =
        dynamics::sample_shots(probs, static_cast<std::uint64_t>(shots),
                               rng::task_seed(seed, point_index));
    return static_cast<double>(counts[0]) / static_cast<double>(shots);
}

pulses::Shape gate_shape(const ExperimentOptions& opts, double theta) {
    pulses::GaussianShape g = opts.pulse;
    g.amplitude = pulses::amplitude_for_angle(theta, pulses::Shape{g});
    if (opts.eta_ns != 0.0) return pulses::DragShape{g, opts.eta_ns};
    return g;
}

CMat ground_state(int dims) {
    CMat rho(dims);
    rho(0, 0) = 1.0;
    return rho;
}

}  // namespace

std::vector<double> default_delays_ns(double expected_ns, int points, bool log_spaced) {
    if (points < 4) throw ConfigError("default_delays_ns: need at least 4 points");
    if (!(expected_ns > 0.0)) throw ConfigError("default_delays_ns: expected time must be > 0");
    std::vector<double> delays;
    delays.reserve(static_cast<std::size_t>(points));
    const double hi = 3.0 * expected_ns;
    delays.push_back(0.0);
    if (log_spaced) {
        const double lo = hi / 100.0;
        for (int i = 1; i < points; ++i)
            delays.push_back(lo * std::pow(hi / lo, static_cast<double>(i - 1) / (points - 2)));
    } else {
        for (int i = 1; i < points; ++i)
            delays.push_back(hi * static_cast<double>(i) / (points - 1));
    }
    return delays;
}

CoherenceResult t1_experiment(const dynamics::SystemModel& system,
                              const dynamics::NoiseModel& noise,
                              const std::vector<double>& delays_ns, int shots,
                              std::uint64_t seed, const ExperimentOptions& opts) {
    check_delays(delays_ns);
    const auto n = effective_noise(noise, opts);
    const double carrier = system.w_ge_ghz;
    const Superop pi_pulse =
        pulse_superop(system, n, gate_shape(opts, M_PI), 0.0, carrier, opts.dt_ns);

    CoherenceResult result;
    result.curve.delays_ns = delays_ns;
    result.curve.values.resize(delays_ns.size());
    result.curve.shots = shots;

    const CMat prepared = pi_pulse.apply_to(ground_state(system.dims));
    parallel::parallel_for(delays_ns.size(), [&](std::size_t i) {
        const Superop idle = dynamics::idle_superop(system, &n, carrier, delays_ns[i]);
        const CMat rho = idle.apply_to(prepared);
        result.curve.values[i] = maybe_sample(reported_excited(rho, n), shots, seed, i);
    });

    result.fit = fit::fit_exponential(delays_ns, result.curve.values);
    result.time_ns = result.fit.params[1];
    result.time_stderr_ns = result.fit.stderrs[1];
    return result;
}

CoherenceResult ramsey_experiment(const dynamics::SystemModel& system,
                                  const dynamics::NoiseModel& noise,
                                  const std::vector<double>& delays_ns, int shots,
                                  std::uint64_t seed, const ExperimentOptions& opts) {
    check_delays(delays_ns);
    const auto n = effective_noise(noise, opts);
    const double carrier = system.w_ge_ghz;
    const pulses::Shape half = gate_shape(opts, M_PI / 2.0);
    const Superop first = pulse_superop(system, n, half, 0.0, carrier, opts.dt_ns);

    CoherenceResult result;
    result.curve.delays_ns = delays_ns;
    result.curve.values.resize(delays_ns.size());
    result.curve.shots = shots;

    const CMat prepared = first.apply_to(ground_state(system.dims));
    const double detuning_ghz = opts.detuning_mhz * 1e-3;
    parallel::parallel_for(delays_ns.size(), [&](std::size_t i) {
        const double tau = delays_ns[i];
        const Superop idle = dynamics::idle_superop(system, &n, carrier, tau);
        const double phase = kTwoPi * detuning_ghz * tau;  // virtual detuning frame advance
        const Superop second = pulse_superop(system, n, half, phase, carrier, opts.dt_ns);
        const CMat rho = second.apply_to(idle.apply_to(prepared));
        result.curve.values[i] = maybe_sample(reported_excited(rho, n), shots, seed, i);
    });

    result.fit = fit::fit_damped_cosine(delays_ns, result.curve.values);
    result.time_ns = result.fit.params[1];
    result.time_stderr_ns = result.fit.stderrs[1];
    result.freq_mhz = result.fit.params[2] * 1e3;  // GHz → MHz
    result.freq_stderr_mhz = result.fit.stderrs[2] * 1e3;
    return result;
}

CoherenceResult echo_experiment(const dynamics::SystemModel& system,
                                const dynamics::NoiseModel& noise,
                                const std::vector<double>& delays_ns, int shots,
                                std::uint64_t seed, const ExperimentOptions& opts) {
    check_delays(delays_ns);
    const auto n = effective_noise(noise, opts);
    const double carrier = system.w_ge_ghz;
    const Superop half =
        pulse_superop(system, n, gate_shape(opts, M_PI / 2.0), 0.0, carrier, opts.dt_ns);
    const Superop pi_pulse =
        pulse_superop(system, n, gate_shape(opts, M_PI), 0.0, carrier, opts.dt_ns);

    CoherenceResult result;
    result.curve.delays_ns = delays_ns;
    result.curve.values.resize(delays_ns.size());
    result.curve.shots = shots;

    const CMat prepared = half.apply_to(ground_state(system.dims));
    parallel::parallel_for(delays_ns.size(), [&](std::size_t i) {
        const Superop idle_half = dynamics::idle_superop(system, &n, carrier, delays_ns[i] / 2.0);
        CMat rho = idle_half.apply_to(prepared);
        rho = pi_pulse.apply_to(rho);
        rho = idle_half.apply_to(rho);
        rho = half.apply_to(rho);
        result.curve.values[i] = maybe_sample(reported_excited(rho, n), shots, seed, i);
    });

    result.fit = fit::fit_exponential(delays_ns, result.curve.values);
    result.time_ns = result.fit.params[1];
    result.time_stderr_ns = result.fit.stderrs[1];
    return result;
}

std::vector<SpectroscopyRow> spectroscopy(const circuit::CircuitParams& params,
                                          const std::vector<double>& flux_grid,
                                          const circuit::BasisConfig& basis) {
    const auto rows = circuit::flux_sweep(params, flux_grid, 3, basis);
    std::vector<SpectroscopyRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.flux, r.w_ge_ghz, r.w_gf_ghz});
    return out;
}

}  // namespace csfq::experiments
