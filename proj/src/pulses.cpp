#include "csfq/pulses.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "csfq/errors.hpp"

namespace csfq::pulses {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;

const GaussianShape& base_of(const Shape& shape) {
    if (const auto* g = std::get_if<GaussianShape>(&shape)) return *g;
    return std::get<DragShape>(shape).base;
}

double gaussian_i(const GaussianShape& g, double t) {
    const double tc = 0.5 * g.total_length_ns;
    const double s2 = 2.0 * g.sigma_ns() * g.sigma_ns();
    return g.amplitude * (std::exp(-(t - tc) * (t - tc) / s2) - std::exp(-tc * tc / s2));
}

double gaussian_di(const GaussianShape& g, double t) {
    const double tc = 0.5 * g.total_length_ns;
    const double sig2 = g.sigma_ns() * g.sigma_ns();
    return g.amplitude * (-(t - tc) / sig2) * std::exp(-(t - tc) * (t - tc) / (2.0 * sig2));
}

// adaptive Simpson with absolute tolerance budget
double simpson(double (*f)(const Shape&, double), const Shape& shape, double a, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(shape, lm), frm = f(shape, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, shape, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, shape, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(double (*f)(const Shape&, double), const Shape& shape, double a, double b,
                 double tol_abs) {
    const double m = 0.5 * (a + b);
    const double fa = f(shape, a), fm = f(shape, m), fb = f(shape, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, shape, a, b, fa, fm, fb, whole, tol_abs, 40);
}

}  // namespace

double GaussianShape::sigma_ns() const {
    return fwhm_ns / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

void GaussianShape::validate() const {
    if (!(total_length_ns > 0.0)) throw ConfigError("pulse total_length must be > 0");
    if (!(fwhm_ns > 0.0 && fwhm_ns <= total_length_ns))
        throw ConfigError("pulse fwhm must lie in (0, total_length]");
    if (!std::isfinite(amplitude)) throw ConfigError("pulse amplitude must be finite");
}

double shape_length_ns(const Shape& shape) { return base_of(shape).total_length_ns; }
double shape_amplitude(const Shape& shape) { return base_of(shape).amplitude; }

double shape_eta_ns(const Shape& shape) {
    if (const auto* d = std::get_if<DragShape>(&shape)) return d->eta_ns;
    return 0.0;
}

Shape with_amplitude(const Shape& shape, double amplitude) {
    Shape out = shape;
    if (auto* g = std::get_if<GaussianShape>(&out))
        g->amplitude = amplitude;
    else
        std::get<DragShape>(out).base.amplitude = amplitude;
    return out;
}

double envelope_i(const Shape& shape, double t_ns) {
    const GaussianShape& g = base_of(shape);
    g.validate();
    if (t_ns < 0.0 || t_ns > g.total_length_ns)
        throw ConfigError("envelope_i: time outside segment");
    if (t_ns == 0.0 || t_ns == g.total_length_ns) return 0.0;
    return gaussian_i(g, t_ns);
}

double envelope_q(const Shape& shape, double t_ns) {
    const GaussianShape& g = base_of(shape);
    g.validate();
    if (t_ns < 0.0 || t_ns > g.total_length_ns)
        throw ConfigError("envelope_q: time outside segment");
    const double eta = shape_eta_ns(shape);
    if (eta == 0.0) return 0.0;
    return eta * gaussian_di(g, t_ns);
}

double pulse_area(const Shape& shape) {
    const GaussianShape& g = base_of(shape);
    g.validate();
    const double len = g.total_length_ns;
    const double scale = std::max(std::abs(g.amplitude), 1.0) * len;
    const double area = integrate(&envelope_i, shape, 0.0, len, 1e-10 * scale);
    if (shape_eta_ns(shape) != 0.0) {
        const double q_area = integrate(&envelope_q, shape, 0.0, len, 1e-12 * scale);
        const double q_scale = std::abs(shape_eta_ns(shape)) * std::abs(g.amplitude) * len;
        if (std::abs(q_area) > 1e-9 * std::max(q_scale, 1e-30))
            throw SolverError("pulse_area: quadrature component failed to cancel", q_area);
    }
    return area;
}

double amplitude_for_angle(double theta_rad, const Shape& shape_template) {
    if (theta_rad < 0.0) throw ConfigError("amplitude_for_angle: theta must be >= 0");
    const double unit = pulse_area(with_amplitude(shape_template, 1.0));
    if (std::abs(unit) < 1e-12)
        throw ConfigError("amplitude_for_angle: degenerate shape with zero unit area");
    return theta_rad / unit;
}

void PulseProgram::validate() const {
    double cursor = 0.0;
    for (const auto& seg : segments) {
        base_of(seg.shape).validate();
        if (seg.start_ns < cursor - 1e-12)
            throw ConfigError("pulse program: overlapping or unordered segments");
        cursor = seg.end_ns();
    }
    if (duration_ns < cursor - 1e-12)
        throw ConfigError("pulse program: duration shorter than last segment");
}

PulseProgram schedule(std::span<const GateSpec> gates, double carrier_ghz,
                      const GaussianShape& shape_template) {
    shape_template.validate();
    PulseProgram program;
    double start = 0.0;
    for (const auto& gate : gates) {
        const double mag = std::abs(gate.angle_rad);
        const bool known = mag == 0.0 || std::abs(mag - kHalfPi) < 1e-12 ||
                           std::abs(mag - kPi) < 1e-12;
        if (!known) throw ConfigError("schedule: unsupported gate angle");

        double amplitude = 0.0;
        if (mag > 0.0)
            amplitude = gate.amplitude
                            ? *gate.amplitude
                            : amplitude_for_angle(mag, Shape{shape_template});
        double phase = (gate.axis == Axis::Y) ? kHalfPi : 0.0;
        if (gate.angle_rad < 0.0) phase += kPi;

        GaussianShape g = shape_template;
        g.amplitude = amplitude;
        Shape shape = (gate.eta_ns != 0.0) ? Shape{DragShape{g, gate.eta_ns}} : Shape{g};
        program.segments.push_back({shape, phase, carrier_ghz, start});
        start += shape_template.total_length_ns;
    }
    program.duration_ns = start;
    return program;
}

GateSpec to_gate_spec(PhysGate gate, double amp_half, double amp_full, double eta_ns) {
    switch (gate) {
        case PhysGate::I: return {Axis::X, 0.0, eta_ns, std::nullopt};
        case PhysGate::XHalf: return {Axis::X, kHalfPi, eta_ns, amp_half};
        case PhysGate::XHalfNeg: return {Axis::X, -kHalfPi, eta_ns, amp_half};
        case PhysGate::YHalf: return {Axis::Y, kHalfPi, eta_ns, amp_half};
        case PhysGate::YHalfNeg: return {Axis::Y, -kHalfPi, eta_ns, amp_half};
        case PhysGate::X: return {Axis::X, kPi, eta_ns, amp_full};
        case PhysGate::Y: return {Axis::Y, kPi, eta_ns, amp_full};
    }
    throw ConfigError("to_gate_spec: unknown gate");
}

std::string phys_gate_name(PhysGate gate) {
    switch (gate) {
        case PhysGate::I: return "i";
        case PhysGate::XHalf: return "xhalf";
        case PhysGate::XHalfNeg: return "xhalf_neg";
        case PhysGate::YHalf: return "yhalf";
        case PhysGate::YHalfNeg: return "yhalf_neg";
        case PhysGate::X: return "x";
        case PhysGate::Y: return "y";
    }
    throw ConfigError("phys_gate_name: unknown gate");
}

EnvelopeSampler::EnvelopeSampler(const Shape& shape) {
    const GaussianShape& g = base_of(shape);
    g.validate();
    const double sig = g.sigma_ns();
    tc_ = 0.5 * g.total_length_ns;
    inv_s2_ = 1.0 / (sig * sig);
    inv_2s2_ = 0.5 * inv_s2_;
    amp_ = g.amplitude;
    base_ = std::exp(-tc_ * tc_ * inv_2s2_);
    eta_ = shape_eta_ns(shape);
    len_ = g.total_length_ns;
}

std::string program_to_json(const PulseProgram& program) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& seg : program.segments) {
        out.push_back({{"start_ns", seg.start_ns},
                       {"length_ns", seg.length_ns()},
                       {"phase_rad", seg.phase_rad},
                       {"carrier_ghz", seg.carrier_ghz},
                       {"amplitude", shape_amplitude(seg.shape)},
                       {"eta_ns", shape_eta_ns(seg.shape)}});
    }
    return nlohmann::json{{"duration_ns", program.duration_ns}, {"segments", out}}.dump(2);
}

}  // namespace csfq::pulses
