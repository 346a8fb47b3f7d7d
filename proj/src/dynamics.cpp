#include "csfq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csfq/errors.hpp"
#include "csfq/rng.hpp"

namespace csfq::dynamics {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kGapEps = 1e-12;  // ns; below this segments count as back-to-back

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// propagation context and state blocks

// A block is `cols` d×d matrices evolving under the same Hamiltonian:
// one column for plain propagation, d² columns when building a superoperator.
struct Block {
    int d = 0;
    int cols = 0;
    std::vector<cd> data;

    Block(int d, int cols) : d(d), cols(cols), data(static_cast<std::size_t>(cols) * d * d) {}
    cd* mat(int c) { return data.data() + static_cast<std::size_t>(c) * d * d; }
    const cd* mat(int c) const { return data.data() + static_cast<std::size_t>(c) * d * d; }
    std::size_t size() const { return data.size(); }
};

struct PropContext {
    int d = 0;
    bool unitary_state = false;        // true: dM/dt = −i H̃ M (propagator itself)
    bool dissipative = false;
    std::vector<double> delta;         // Δ_j, rad/ns
    std::vector<double> lambda;        // λ_{j,j+1}
    std::vector<double> relax;         // g_j = j/T1 (out-rate of level j)
    std::vector<double> decay;         // Γ[r][c]: per-element decay rate, d×d
};

PropContext make_context(const SystemModel& system, const NoiseModel* noise, double carrier_ghz,
                         bool unitary_state) {
    system.validate();
    PropContext ctx;
    ctx.d = system.dims;
    ctx.unitary_state = unitary_state;
    ctx.delta = system.detunings_rad_ns(carrier_ghz);
    ctx.lambda = system.drive_weights;
    ctx.relax.assign(ctx.d, 0.0);
    ctx.decay.assign(static_cast<std::size_t>(ctx.d) * ctx.d, 0.0);
    if (noise != nullptr) {
        noise->validate();
        ctx.dissipative = true;
        for (int j = 1; j < ctx.d; ++j) ctx.relax[j] = static_cast<double>(j) / noise->t1_ns;
        for (int r = 0; r < ctx.d; ++r)
            for (int c = 0; c < ctx.d; ++c) {
                const double dn = static_cast<double>(r - c);
                ctx.decay[static_cast<std::size_t>(r) * ctx.d + c] =
                    0.5 * (ctx.relax[r] + ctx.relax[c]) + dn * dn / noise->t_phi_ns;
            }
    }
    return ctx;
}

// right-hand side of the evolution for one stage, given drive couplings w_j
void eval_rhs(const PropContext& ctx, const cd* w, const Block& m, Block& k) {
    const int d = ctx.d;
    const auto& ops = kernels::active();
    const cd minus_i(0.0, -1.0);
    for (int c = 0; c < m.cols; ++c) {
        const cd* src = m.mat(c);
        cd* dst = k.mat(c);
        if (ctx.unitary_state) {
            // K = −i H̃ M, H̃ tridiagonal with w on the upper off-diagonal
            for (int j = 0; j < d; ++j) {
                cd* row = dst + static_cast<std::size_t>(j) * d;
                std::fill(row, row + d, cd(0.0));
                if (j < d - 1)
                    ops.caxpy(row, minus_i * w[j], src + static_cast<std::size_t>(j + 1) * d, d);
                if (j > 0)
                    ops.caxpy(row, minus_i * std::conj(w[j - 1]),
                              src + static_cast<std::size_t>(j - 1) * d, d);
            }
        } else {
            // K = −i (H̃ρ − ρH̃) + dissipator(ρ)
            for (int r = 0; r < d; ++r)
                for (int cc = 0; cc < d; ++cc) {
                    cd acc = 0.0;
                    if (r < d - 1) acc += w[r] * src[(r + 1) * d + cc];
                    if (r > 0) acc += std::conj(w[r - 1]) * src[(r - 1) * d + cc];
                    if (cc > 0) acc -= src[r * d + (cc - 1)] * w[cc - 1];
                    if (cc < d - 1) acc -= src[r * d + (cc + 1)] * std::conj(w[cc]);
                    acc *= minus_i;
                    if (ctx.dissipative) {
                        acc -= ctx.decay[static_cast<std::size_t>(r) * d + cc] * src[r * d + cc];
                        if (r == cc && r < d - 1)
                            acc += ctx.relax[r + 1] * src[(r + 1) * d + (r + 1)];
                    }
                    dst[r * d + cc] = acc;
                }
        }
    }
}

// drive couplings at local time t: w_j = ½ λ_j (Ω_I − iΩ_Q) e^{−iφ} e^{i(Δ_j−Δ_{j+1}) t}
void drive_couplings(const PropContext& ctx, const EnvelopeFn& env, cd phase_factor, double t,
                     cd* w) {
    const auto [oi, oq] = env(t);
    const cd base = 0.5 * cd(oi, -oq) * phase_factor;
    for (int j = 0; j + 1 < ctx.d; ++j)
        w[j] = ctx.lambda[j] * base * std::polar(1.0, (ctx.delta[j] - ctx.delta[j + 1]) * t);
}

// fixed-step RK4 over one driven segment (interaction picture of the
// detuning diagonal); the exact e^{−iDL} boundary rotation is applied after.
void integrate_segment(const PropContext& ctx, Block& state, const EnvelopeFn& env,
                       double phase_rad, double length_ns, double dt_ns) {
    if (length_ns <= 0.0) return;
    if (dt_ns <= 0.0) throw ConfigError("propagate: dt must be > 0");
    const auto steps = static_cast<std::size_t>(std::ceil(length_ns / dt_ns - 1e-9));
    if (steps > (1u << 31)) throw ConfigError("propagate: step count overflow");
    const double h = length_ns / static_cast<double>(steps);

    const auto& ops = kernels::active();
    const cd phase_factor = std::polar(1.0, -phase_rad);
    const std::size_t n = state.size();
    Block k1(ctx.d, state.cols), k2(ctx.d, state.cols), k3(ctx.d, state.cols),
        k4(ctx.d, state.cols), tmp(ctx.d, state.cols);
    std::vector<cd> w(static_cast<std::size_t>(ctx.d));

    for (std::size_t i = 0; i < steps; ++i) {
        const double t0 = static_cast<double>(i) * h;
        drive_couplings(ctx, env, phase_factor, t0, w.data());
        eval_rhs(ctx, w.data(), state, k1);
        ops.axpy_real(tmp.data.data(), state.data.data(), 0.5 * h, k1.data.data(), n);
        drive_couplings(ctx, env, phase_factor, t0 + 0.5 * h, w.data());
        eval_rhs(ctx, w.data(), tmp, k2);
        ops.axpy_real(tmp.data.data(), state.data.data(), 0.5 * h, k2.data.data(), n);
        eval_rhs(ctx, w.data(), tmp, k3);
        ops.axpy_real(tmp.data.data(), state.data.data(), h, k3.data.data(), n);
        drive_couplings(ctx, env, phase_factor, t0 + h, w.data());
        eval_rhs(ctx, w.data(), tmp, k4);
        ops.rk4_combine(state.data.data(), state.data.data(), h / 6.0, k1.data.data(),
                        k2.data.data(), k3.data.data(), k4.data.data(), n);
    }

    // leave the interaction picture: U ← e^{−iDL} Ũ, ρ ← e^{−iDL} ρ̃ e^{iDL}
    const auto& k = kernels::active();
    for (int c = 0; c < state.cols; ++c) {
        cd* m = state.mat(c);
        for (int r = 0; r < ctx.d; ++r) {
            if (ctx.unitary_state) {
                const cd ph = std::polar(1.0, -ctx.delta[r] * length_ns);
                k.cscale(m + static_cast<std::size_t>(r) * ctx.d,
                         ph, m + static_cast<std::size_t>(r) * ctx.d, ctx.d);
            } else {
                for (int cc = 0; cc < ctx.d; ++cc)
                    m[r * ctx.d + cc] *=
                        std::polar(1.0, -(ctx.delta[r] - ctx.delta[cc]) * length_ns);
            }
        }
    }
}

// death-process population transfer matrix T_{jk}(τ) for rates g_i = i/T1
std::vector<double> population_transfer(const PropContext& ctx, double tau_ns) {
    const int d = ctx.d;
    std::vector<double> t(static_cast<std::size_t>(d) * d, 0.0);
    const bool no_relax = std::none_of(ctx.relax.begin(), ctx.relax.end(),
                                       [](double g) { return g > 0.0; });
    if (no_relax || tau_ns == 0.0) {
        for (int j = 0; j < d; ++j) t[static_cast<std::size_t>(j) * d + j] = 1.0;
        return t;
    }
    for (int k = 0; k < d; ++k) {
        t[static_cast<std::size_t>(k) * d + k] = std::exp(-ctx.relax[k] * tau_ns);
        for (int j = k - 1; j >= 0; --j) {
            double prefactor = 1.0;
            for (int i = j + 1; i <= k; ++i) prefactor *= ctx.relax[i];
            double sum = 0.0;
            for (int i = j; i <= k; ++i) {
                double denom = 1.0;
                for (int l = j; l <= k; ++l)
                    if (l != i) denom *= ctx.relax[l] - ctx.relax[i];
                sum += std::exp(-ctx.relax[i] * tau_ns) / denom;
            }
            t[static_cast<std::size_t>(j) * d + k] = prefactor * sum;
        }
    }
    return t;
}

// exact zero-drive evolution for duration tau
void apply_idle(const PropContext& ctx, Block& state, double tau_ns) {
    if (tau_ns <= 0.0) return;
    const int d = ctx.d;
    if (ctx.unitary_state) {
        const auto& k = kernels::active();
        for (int c = 0; c < state.cols; ++c)
            for (int r = 0; r < d; ++r) {
                cd* row = state.mat(c) + static_cast<std::size_t>(r) * d;
                k.cscale(row, std::polar(1.0, -ctx.delta[r] * tau_ns), row, d);
            }
        return;
    }
    const auto pop = population_transfer(ctx, tau_ns);
    std::vector<cd> diag(static_cast<std::size_t>(d));
    for (int c = 0; c < state.cols; ++c) {
        cd* m = state.mat(c);
        for (int j = 0; j < d; ++j) diag[j] = m[j * d + j];
        for (int r = 0; r < d; ++r)
            for (int cc = 0; cc < d; ++cc) {
                if (r == cc) continue;
                const double rate = ctx.decay[static_cast<std::size_t>(r) * d + cc];
                m[r * d + cc] *= std::exp(-rate * tau_ns) *
                                 std::polar(1.0, -(ctx.delta[r] - ctx.delta[cc]) * tau_ns);
            }
        for (int r = 0; r < d; ++r) {
            cd acc = 0.0;
            for (int cc = 0; cc < d; ++cc) acc += pop[static_cast<std::size_t>(r) * d + cc] * diag[cc];
            m[r * d + r] = acc;
        }
    }
}

double program_carrier(const SystemModel& system, const pulses::PulseProgram& program) {
    if (program.segments.empty()) return system.w_ge_ghz;  // idle frame: resonant carrier
    const double carrier = program.segments.front().carrier_ghz;
    for (const auto& seg : program.segments)
        if (std::abs(seg.carrier_ghz - carrier) > 1e-12)
            throw ConfigError("propagate: segments must share one carrier (single rotating frame)");
    return carrier;
}

void walk_program(const PropContext& ctx, Block& state, const pulses::PulseProgram& program,
                  double dt_ns) {
    program.validate();
    double cursor = 0.0;
    for (const auto& seg : program.segments) {
        if (seg.start_ns > cursor + kGapEps) apply_idle(ctx, state, seg.start_ns - cursor);
        const pulses::EnvelopeSampler sampler(seg.shape);
        if (sampler.is_zero()) {
            apply_idle(ctx, state, sampler.length_ns());
        } else {
            const EnvelopeFn env = [&sampler](double t) { return sampler.at(t); };
            integrate_segment(ctx, state, env, seg.phase_rad, sampler.length_ns(), dt_ns);
        }
        cursor = seg.end_ns();
    }
    if (program.duration_ns > cursor + kGapEps)
        apply_idle(ctx, state, program.duration_ns - cursor);
}

void check_trace(const Block& state, int col, int d) {
    cd tr = 0.0;
    for (int j = 0; j < d; ++j) tr += state.mat(col)[j * d + j];
    if (std::abs(tr - cd(1.0)) > 1e-6)
        throw SolverError("propagate_lindblad: trace drift beyond 1e-6", std::abs(tr - cd(1.0)));
}

}  // namespace

// ---------------------------------------------------------------------------
// SystemModel / NoiseModel

double SystemModel::level_energy_ghz(int j) const {
    return j * w_ge_ghz + 0.5 * j * (j - 1) * anharm_ghz;
}

std::vector<double> SystemModel::detunings_rad_ns(double carrier_ghz) const {
    std::vector<double> delta(static_cast<std::size_t>(dims));
    for (int j = 0; j < dims; ++j)
        delta[j] = kTwoPi * (level_energy_ghz(j) - j * carrier_ghz);
    return delta;
}

void SystemModel::validate() const {
    if (dims < 2) throw ConfigError("system dims must be >= 2");
    if (!(w_ge_ghz > 0.0)) throw ConfigError("w_ge must be > 0");
    if (static_cast<int>(drive_weights.size()) != dims - 1)
        throw ConfigError("drive_weights must have dims-1 entries");
    if (drive_weights[0] != 1.0) throw ConfigError("drive weight λ01 must be 1");
}

SystemModel SystemModel::standalone(int dims, double w_ge_ghz, double anharm_ghz) {
    SystemModel m;
    m.dims = dims;
    m.w_ge_ghz = w_ge_ghz;
    m.anharm_ghz = anharm_ghz;
    m.drive_weights.resize(static_cast<std::size_t>(dims - 1));
    for (int j = 0; j + 1 < dims; ++j) m.drive_weights[j] = std::sqrt(j + 1.0);
    m.validate();
    return m;
}

void Confusion::validate() const {
    for (double v : {p_gg, p_ge, p_eg, p_ee})
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("confusion entries must lie in [0,1]");
    if (std::abs(p_gg + p_eg - 1.0) > 1e-12 || std::abs(p_ge + p_ee - 1.0) > 1e-12)
        throw ConfigError("confusion columns must sum to 1");
}

void NoiseModel::validate() const {
    if (!(t1_ns > 0.0)) throw ConfigError("T1 must be > 0");
    if (!(t_phi_ns > 0.0)) throw ConfigError("T_phi must be > 0");
    confusion.validate();
}

NoiseModel NoiseModel::from_us(double t1_us, double t_phi_us, Confusion c) {
    NoiseModel n{t1_us * 1e3, t_phi_us * 1e3, c};
    n.validate();
    return n;
}

// ---------------------------------------------------------------------------
// public operations

CMat rotating_hamiltonian(const SystemModel& system, const pulses::PulseProgram& program,
                          double t_ns) {
    system.validate();
    program.validate();
    if (t_ns < 0.0 || t_ns > program.duration_ns)
        throw ConfigError("rotating_hamiltonian: time outside program");
    const double carrier = program_carrier(system, program);
    const auto delta = system.detunings_rad_ns(carrier);

    CMat h(system.dims);
    for (int j = 0; j < system.dims; ++j) h(j, j) = delta[j];
    for (const auto& seg : program.segments) {
        if (t_ns < seg.start_ns || t_ns > seg.end_ns()) continue;
        const pulses::EnvelopeSampler sampler(seg.shape);
        const auto [oi, oq] = sampler.at(t_ns - seg.start_ns);
        const cd coupling = 0.5 * cd(oi, -oq) * std::polar(1.0, -seg.phase_rad);
        for (int j = 0; j + 1 < system.dims; ++j) {
            h(j, j + 1) = system.drive_weights[j] * coupling;
            h(j + 1, j) = std::conj(h(j, j + 1));
        }
        break;
    }
    return h;
}

CMat propagate_unitary(const SystemModel& system, const pulses::PulseProgram& program,
                       double dt_ns) {
    const double carrier = program_carrier(system, program);
    PropContext ctx = make_context(system, nullptr, carrier, true);
    Block state(system.dims, 1);
    CMat id = CMat::identity(system.dims);
    std::copy(id.a.begin(), id.a.end(), state.data.begin());
    walk_program(ctx, state, program, dt_ns);
    CMat u(system.dims);
    std::copy(state.data.begin(), state.data.end(), u.a.begin());
    return u;
}

CMat propagate_lindblad(const SystemModel& system, const NoiseModel& noise,
                        const pulses::PulseProgram& program, const CMat& rho0, double dt_ns) {
    if (rho0.n != system.dims) throw ConfigError("propagate_lindblad: rho dimension mismatch");
    const double carrier = program_carrier(system, program);
    PropContext ctx = make_context(system, &noise, carrier, false);
    Block state(system.dims, 1);
    std::copy(rho0.a.begin(), rho0.a.end(), state.data.begin());
    check_trace(state, 0, system.dims);
    walk_program(ctx, state, program, dt_ns);
    check_trace(state, 0, system.dims);
    CMat rho(system.dims);
    std::copy(state.data.begin(), state.data.end(), rho.a.begin());
    return rho;
}

CMat propagate_unitary_segment(const SystemModel& system, double carrier_ghz,
                               const EnvelopeFn& envelope, double phase_rad, double length_ns,
                               double dt_ns) {
    PropContext ctx = make_context(system, nullptr, carrier_ghz, true);
    Block state(system.dims, 1);
    CMat id = CMat::identity(system.dims);
    std::copy(id.a.begin(), id.a.end(), state.data.begin());
    integrate_segment(ctx, state, envelope, phase_rad, length_ns, dt_ns);
    CMat u(system.dims);
    std::copy(state.data.begin(), state.data.end(), u.a.begin());
    return u;
}

CMat propagate_lindblad_segment(const SystemModel& system, const NoiseModel& noise,
                                double carrier_ghz, const EnvelopeFn& envelope, double phase_rad,
                                double length_ns, const CMat& rho0, double dt_ns) {
    if (rho0.n != system.dims) throw ConfigError("propagate_lindblad: rho dimension mismatch");
    PropContext ctx = make_context(system, &noise, carrier_ghz, false);
    Block state(system.dims, 1);
    std::copy(rho0.a.begin(), rho0.a.end(), state.data.begin());
    integrate_segment(ctx, state, envelope, phase_rad, length_ns, dt_ns);
    CMat rho(system.dims);
    std::copy(state.data.begin(), state.data.end(), rho.a.begin());
    return rho;
}

Superop idle_superop(const SystemModel& system, const NoiseModel* noise, double carrier_ghz,
                     double tau_ns) {
    PropContext ctx = make_context(system, noise, carrier_ghz, false);
    const int d = system.dims;
    Block state(d, d * d);
    for (int c = 0; c < d * d; ++c) state.mat(c)[c] = 1.0;  // basis matrix E_c
    apply_idle(ctx, state, tau_ns);
    Superop s(d);
    for (int c = 0; c < d * d; ++c)
        std::copy(state.mat(c), state.mat(c) + d * d,
                  s.col.begin() + static_cast<std::size_t>(c) * d * d);
    return s;
}

Superop program_superop(const SystemModel& system, const NoiseModel* noise,
                        const pulses::PulseProgram& program, double dt_ns) {
    const int d = system.dims;
    if (noise == nullptr) {
        const CMat u = propagate_unitary(system, program, dt_ns);
        Superop s(d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const int column = a * d + b;  // image of E_ab
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        s.at(r * d + c, column) = u(r, a) * std::conj(u(c, b));
            }
        return s;
    }
    const double carrier = program_carrier(system, program);
    PropContext ctx = make_context(system, noise, carrier, false);
    Block state(d, d * d);
    for (int c = 0; c < d * d; ++c) state.mat(c)[c] = 1.0;
    walk_program(ctx, state, program, dt_ns);
    Superop s(d);
    for (int c = 0; c < d * d; ++c)
        std::copy(state.mat(c), state.mat(c) + d * d,
                  s.col.begin() + static_cast<std::size_t>(c) * d * d);
    return s;
}

Superop gate_superop(const SystemModel& system, const NoiseModel* noise,
                     const pulses::GateSpec& gate, double carrier_ghz,
                     const pulses::GaussianShape& shape_template, double dt_ns) {
    const pulses::GateSpec gates[] = {gate};
    const auto program = pulses::schedule(gates, carrier_ghz, shape_template);
    return program_superop(system, noise, program, dt_ns);
}

CMat gate_unitary(const SystemModel& system, const pulses::GateSpec& gate, double carrier_ghz,
                  const pulses::GaussianShape& shape_template, double dt_ns) {
    const pulses::GateSpec gates[] = {gate};
    const auto program = pulses::schedule(gates, carrier_ghz, shape_template);
    return propagate_unitary(system, program, dt_ns);
}

// ---------------------------------------------------------------------------
// channels and fidelities

namespace {

CMat pauli2(int a, int d) {
    CMat p(d);
    switch (a) {
        case 0: p(0, 0) = 1.0; p(1, 1) = 1.0; break;             // I
        case 1: p(0, 1) = 1.0; p(1, 0) = 1.0; break;             // X
        case 2: p(0, 1) = cd(0, -1); p(1, 0) = cd(0, 1); break;  // Y
        case 3: p(0, 0) = 1.0; p(1, 1) = -1.0; break;            // Z
        default: throw ConfigError("pauli2: bad index");
    }
    return p;
}

}  // namespace

GateChannel channel_from_superop(const Superop& s) {
    const int d = s.d;
    if (d < 2) throw ConfigError("channel_from_superop: need at least 2 levels");
    GateChannel ch;

    // images of the four computational matrix units E_ab
    std::array<CMat, 4> images;
    double leak = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            CMat e(d);
            e(a, b) = 1.0;
            images[a * 2 + b] = s.apply_to(e);
            cd esc = 0.0;
            for (int r = 2; r < d; ++r) esc += images[a * 2 + b](r, r);
            leak += esc.real();
        }
    ch.leakage = leak / 4.0;

    for (int pb = 0; pb < 4; ++pb) {
        // Λ(P_b) by linearity over matrix units
        const CMat p = pauli2(pb, 2);
        CMat image(d);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                kernels::active().caxpy(image.a.data(), p(a, b), images[a * 2 + b].a.data(),
                                        image.a.size());
        for (int pa = 0; pa < 4; ++pa) {
            const CMat q = pauli2(pa, d);
            cd tr = 0.0;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) tr += q(c, r) * image(r, c);
            ch.ptm[pa][pb] = 0.5 * tr.real();
        }
    }
    return ch;
}

GateChannel channel_from_program(const SystemModel& system, const NoiseModel* noise,
                                 const pulses::PulseProgram& program, double dt_ns) {
    return channel_from_superop(program_superop(system, noise, program, dt_ns));
}

GateChannel channel_from_unitary2(const CMat& u) {
    if (u.n != 2) throw ConfigError("channel_from_unitary2: expected a 2x2 matrix");
    GateChannel ch;
    for (int pa = 0; pa < 4; ++pa)
        for (int pb = 0; pb < 4; ++pb) {
            const CMat t = linalg::mul(pauli2(pa, 2), linalg::mul(u, linalg::mul(pauli2(pb, 2),
                                                                                 linalg::dagger(u))));
            ch.ptm[pa][pb] = 0.5 * linalg::trace(t).real();
        }
    return ch;
}

double average_gate_fidelity(const GateChannel& channel, const CMat& target_2x2) {
    if (target_2x2.n != 2) throw ConfigError("average_gate_fidelity: target must be 2x2");
    if (linalg::unitarity_defect(target_2x2) > 1e-10)
        throw ConfigError("average_gate_fidelity: target is not unitary");
    const GateChannel ref = channel_from_unitary2(target_2x2);
    double fpro = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) fpro += ref.ptm[a][b] * channel.ptm[a][b];
    fpro /= 4.0;
    return (2.0 * fpro + 1.0) / 3.0;
}

MeasureResult measure(const CMat& rho, const NoiseModel& noise) {
    noise.confusion.validate();
    double p_g = rho(0, 0).real();
    p_g = std::clamp(p_g, 0.0, 1.0);
    const double p_e = 1.0 - p_g;
    return {noise.confusion.p_gg * p_g + noise.confusion.p_ge * p_e,
            noise.confusion.p_eg * p_g + noise.confusion.p_ee * p_e};
}

std::vector<std::uint64_t> sample_shots(std::span<const double> probs, std::uint64_t n_shots,
                                        std::uint64_t seed) {
    if (probs.empty()) throw ConfigError("sample_shots: empty probability vector");
    if (n_shots < 1) throw ConfigError("sample_shots: need at least one shot");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
            throw ConfigError("sample_shots: probability outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("sample_shots: probabilities must sum to 1");

    rng::Xoshiro gen(seed);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::uint64_t remaining = n_shots;
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        const double p = rest > 0.0 ? std::clamp(probs[i] / rest, 0.0, 1.0) : 0.0;
        const std::uint64_t hits = rng::binomial(gen, remaining, p);
        counts[i] = hits;
        remaining -= hits;
        rest -= probs[i];
    }
    counts.back() = remaining;
    return counts;
}

}  // namespace csfq::dynamics
