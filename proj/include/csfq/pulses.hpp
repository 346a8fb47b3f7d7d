#pragma once

// Shaped microwave drive envelopes and gate schedules. Amplitudes are
// angular Rabi rates in rad/ns, times in ns, carriers in GHz. Envelopes are
// baseline-subtracted so every segment starts and ends at exactly zero.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace csfq::pulses {

struct GaussianShape {
    double total_length_ns = 20.0;
    double fwhm_ns = 10.0;
    double amplitude = 0.0;  // peak Rabi rate before baseline subtraction, rad/ns

    double sigma_ns() const;
    void validate() const;
};

struct DragShape {
    GaussianShape base;
    double eta_ns = 0.0;  // quadrature = eta · d(envelope)/dt
};

using Shape = std::variant<GaussianShape, DragShape>;

double shape_length_ns(const Shape& shape);
double shape_amplitude(const Shape& shape);
double shape_eta_ns(const Shape& shape);
Shape with_amplitude(const Shape& shape, double amplitude);

/// In-phase envelope at local time t ∈ [0, length].
double envelope_i(const Shape& shape, double t_ns);
/// Quadrature envelope (zero unless the shape carries a DRAG coefficient).
double envelope_q(const Shape& shape, double t_ns);

/// ∫ envelope_i dt over the segment, adaptive quadrature to 1e-10 relative.
/// Checks that the quadrature component integrates to zero.
double pulse_area(const Shape& shape);

/// Amplitude giving pulse area theta, by linear inversion on the template.
double amplitude_for_angle(double theta_rad, const Shape& shape_template);

struct PulseSegment {
    Shape shape;
    double phase_rad = 0.0;
    double carrier_ghz = 0.0;
    double start_ns = 0.0;

    double length_ns() const { return shape_length_ns(shape); }
    double end_ns() const { return start_ns + length_ns(); }
};

struct PulseProgram {
    std::vector<PulseSegment> segments;  // non-overlapping, time-ordered
    double duration_ns = 0.0;            // ≥ end of last segment

    void validate() const;
};

enum class Axis { X, Y };

struct GateSpec {
    Axis axis = Axis::X;
    double angle_rad = 0.0;                 // one of 0, ±π/2, ±π
    double eta_ns = 0.0;
    std::optional<double> amplitude;        // calibrated override; area rule otherwise
};

/// Back-to-back segments, one per gate: X → phase 0, Y → phase π/2, negative
/// angles add π. A zero angle is an identity slot of the full template length.
PulseProgram schedule(std::span<const GateSpec> gates, double carrier_ghz,
                      const GaussianShape& shape_template);

/// Physical gate alphabet used by benchmarking and calibration.
enum class PhysGate { I, XHalf, XHalfNeg, YHalf, YHalfNeg, X, Y };

GateSpec to_gate_spec(PhysGate gate, double amp_half, double amp_full, double eta_ns);
std::string phys_gate_name(PhysGate gate);

/// JSON dump for --dump-pulses: one record per segment.
std::string program_to_json(const PulseProgram& program);

/// Precomputed envelope evaluator for propagation inner loops (no bounds
/// checks, no variant dispatch per sample).
class EnvelopeSampler {
  public:
    explicit EnvelopeSampler(const Shape& shape);

    double length_ns() const { return len_; }
    bool is_zero() const { return amp_ == 0.0; }

    /// (Ω_I, Ω_Q) at local time t ∈ [0, length].
    std::pair<double, double> at(double t) const {
        const double u = t - tc_;
        const double e = std::exp(-u * u * inv_2s2_);
        return {amp_ * (e - base_), eta_ * amp_ * (-u * inv_s2_) * e};
    }

  private:
    double tc_, inv_2s2_, inv_s2_, amp_, base_, eta_, len_;
};

}  // namespace csfq::pulses
