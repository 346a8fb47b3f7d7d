#include "csfq/presets.hpp"

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "csfq/errors.hpp"

namespace csfq::presets {

namespace {

// frozen fit outputs (targets 2.661 GHz / 0.848 GHz and 2.661 GHz / 1.26 GHz
// at f = 0.5; n_max = 15)
constexpr double kDeviceAEj = 41.462555231;
constexpr double kDeviceAEc = 7.5;
constexpr double kDeviceABeta = 18.830369807;
constexpr double kDeviceBEj = 80.112780599;
constexpr double kDeviceBEc = 22.5;
constexpr double kDeviceBBeta = 61.735023603;
constexpr double kAlpha = 0.43;

// transition values of the frozen devices at the sweet spot
constexpr double kWgeA = 2.661;
constexpr double kAnharmA = 0.848;
constexpr double kLambda12A = 1.627799372;
constexpr double kWgeB = 2.661;
constexpr double kAnharmB = 1.260;
constexpr double kLambda12B = 1.717069825;

constexpr double kT1Us = 23.0;
constexpr double kT2RamseyUs = 6.3;
constexpr double kT2EchoUs = 17.4;
constexpr double kFe = 0.75;

double t_phi_from_t2(double t2_us, double t1_us) {
    // 1/T2 = 1/(2 T1) + 1/Tφ
    return 1.0 / (1.0 / t2_us - 1.0 / (2.0 * t1_us));
}

}  // namespace

circuit::CircuitParams device_a() { return {kDeviceAEj, kDeviceAEc, kAlpha, kDeviceABeta, 0.5}; }
circuit::CircuitParams device_b() { return {kDeviceBEj, kDeviceBEc, kAlpha, kDeviceBBeta, 0.5}; }

circuit::CircuitParams device_by_name(const std::string& name) {
    if (name == "device-a") return device_a();
    if (name == "device-b") return device_b();
    throw ConfigError("unknown device preset '" + name + "'");
}

dynamics::Confusion readout_confusion(double f_e) {
    dynamics::Confusion c{f_e, 0.0, 1.0 - f_e, 1.0};
    c.validate();
    return c;
}

dynamics::NoiseModel paper_ramsey() {
    return dynamics::NoiseModel::from_us(kT1Us, t_phi_from_t2(kT2RamseyUs, kT1Us),
                                         readout_confusion(kFe));
}

dynamics::NoiseModel paper_echo() {
    return dynamics::NoiseModel::from_us(kT1Us, t_phi_from_t2(kT2EchoUs, kT1Us),
                                         readout_confusion(kFe));
}

dynamics::NoiseModel device_b_noise() {
    return dynamics::NoiseModel::from_us(6.6, t_phi_from_t2(kT2RamseyUs, kT1Us),
                                         readout_confusion(kFe));
}

pulses::GaussianShape default_pulse() { return {20.0, 10.0, 0.0}; }

dynamics::SystemModel system_a() {
    dynamics::SystemModel m;
    m.dims = 3;
    m.w_ge_ghz = kWgeA;
    m.anharm_ghz = kAnharmA;
    m.drive_weights = {1.0, kLambda12A};
    return m;
}

dynamics::SystemModel system_b() {
    dynamics::SystemModel m;
    m.dims = 3;
    m.w_ge_ghz = kWgeB;
    m.anharm_ghz = kAnharmB;
    m.drive_weights = {1.0, kLambda12B};
    return m;
}

dynamics::SystemModel derive_system(const circuit::CircuitParams& params,
                                    const circuit::BasisConfig& basis, int dims) {
    if (dims < 2) throw ConfigError("derive_system: dims must be >= 2");
    const auto spec = circuit::solve(params, basis, dims);
    const auto t = circuit::transitions(spec);
    dynamics::SystemModel m;
    m.dims = dims;
    m.w_ge_ghz = t.w_ge_ghz;
    m.anharm_ghz = t.anharm_ghz;
    m.drive_weights.resize(static_cast<std::size_t>(dims - 1));
    const double ge = circuit::matrix_element(spec, circuit::ChargeOp::M, 0, 1);
    if (ge <= 0.0) throw SolverError("derive_system: vanishing 0-1 drive element");
    m.drive_weights[0] = 1.0;
    for (int j = 1; j < dims - 1; ++j)
        m.drive_weights[static_cast<std::size_t>(j)] =
            circuit::matrix_element(spec, circuit::ChargeOp::M, j, j + 1) / ge;
    m.validate();
    return m;
}

std::string device_to_json(const circuit::CircuitParams& params) {
    nlohmann::json j{{"ej_ghz", params.ej_ghz},
                     {"ec_ghz", params.ec_ghz},
                     {"alpha", params.alpha},
                     {"beta", params.beta},
                     {"flux", params.flux}};
    return j.dump(2) + "\n";
}

circuit::CircuitParams device_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("device JSON parse error: ") + e.what());
    }
    const std::vector<std::string> keys = {"ej_ghz", "ec_ghz", "alpha", "beta", "flux"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("device JSON: unknown key '" + key + "'");
    }
    circuit::CircuitParams p;
    try {
        p.ej_ghz = j.at("ej_ghz").get<double>();
        p.ec_ghz = j.at("ec_ghz").get<double>();
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.flux = j.at("flux").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("device JSON: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace csfq::presets
