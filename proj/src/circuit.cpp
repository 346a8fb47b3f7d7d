#include "csfq/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "csfq/errors.hpp"
#include "csfq/parallel.hpp"

namespace csfq::circuit {

namespace {

constexpr std::size_t kDimensionCap = 16'000'000;  // dense solve memory guard
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void CircuitParams::validate() const {
    if (!finite(ej_ghz) || !finite(ec_ghz) || !finite(alpha) || !finite(beta) || !finite(flux))
        throw ConfigError("circuit parameters must be finite");
    if (ej_ghz < 0.0) throw ConfigError("ej_ghz must be >= 0");
    if (ec_ghz <= 0.0) throw ConfigError("ec_ghz must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
}

double CircuitParams::reduced_flux() const {
    double f = std::fmod(flux, 1.0);
    if (f < 0.0) f += 1.0;
    return f;
}

void BasisConfig::validate() const {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (dimension() > kDimensionCap) throw ConfigError("charge basis dimension exceeds cap");
}

std::size_t BasisConfig::dimension() const {
    // even-sum points of the (2 n_max + 1)² lattice
    const std::size_t w = 2 * static_cast<std::size_t>(n_max) + 1;
    return (w * w + 1) / 2;
}

long BasisConfig::index_of(int np, int nm) const {
    if (std::abs(np) > n_max || std::abs(nm) > n_max) return -1;
    if (((np + nm) & 1) != 0) return -1;
    // with odd row width, physical (even-sum) points are exactly the even
    // row-major offsets, so the compact index is offset / 2
    const long width = 2 * n_max + 1;
    const long flat = (np + n_max) * width + (nm + n_max);
    return flat / 2;
}

std::pair<int, int> BasisConfig::charges_at(long index) const {
    const long width = 2 * n_max + 1;
    const long flat = 2 * index;
    return {static_cast<int>(flat / width) - n_max, static_cast<int>(flat % width) - n_max};
}

SparseH build_hamiltonian(const CircuitParams& params, const BasisConfig& basis) {
    params.validate();
    basis.validate();

    const int n_max = basis.n_max;
    const auto dim = static_cast<Eigen::Index>(basis.dimension());

    const double ej = params.ej_ghz;
    const double kin_p = 2.0 * params.ec_ghz;
    const double kin_m = 2.0 * params.ec_ghz / (1.0 + 2.0 * params.alpha + 2.0 * params.beta);
    const double u0 = (2.0 + params.alpha) * ej;  // constant offset of the potential
    const std::complex<double> flux_phase =
        std::polar(1.0, kTwoPi * params.flux);    // e^{i 2π f}, pairs with the n_m −2 shift

    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 7);
    for (int np = -n_max; np <= n_max; ++np) {
        for (int nm = -n_max; nm <= n_max; ++nm) {
            const long r = basis.index_of(np, nm);
            if (r < 0) continue;
            trip.emplace_back(r, r, kin_p * np * np + kin_m * nm * nm + u0);
            // −2 E_J cos φ_p cos φ_m → −E_J/2 on the four (±1, ±1) shifts
            for (int dp : {-1, 1})
                for (int dm : {-1, 1}) {
                    const long r2 = basis.index_of(np + dp, nm + dm);
                    if (r2 >= 0) trip.emplace_back(r2, r, std::complex<double>(-0.5 * ej));
                }
            // −α E_J cos(2π f + 2 φ_m): e^{i2πf} with the n_m → n_m − 2 shift
            const long rm = basis.index_of(np, nm - 2);
            if (rm >= 0) trip.emplace_back(rm, r, -0.5 * params.alpha * ej * flux_phase);
            const long rp = basis.index_of(np, nm + 2);
            if (rp >= 0)
                trip.emplace_back(rp, r, -0.5 * params.alpha * ej * std::conj(flux_phase));
        }
    }

    SparseH h(dim, dim);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

Spectrum eigensolve(const SparseH& h, int k) {
    if (h.rows() != h.cols()) throw ConfigError("eigensolve: matrix not square");
    if (k < 1 || k > h.rows()) throw ConfigError("eigensolve: bad level count");

    const Eigen::MatrixXcd dense(h);
    const double scale = dense.cwiseAbs().maxCoeff();
    const double herm_defect = (dense - dense.adjoint()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && herm_defect > 1e-12 * scale)
        throw SolverError("eigensolve: input not Hermitian", herm_defect);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw SolverError("eigensolve: diagonalization did not converge",
                          std::numeric_limits<double>::quiet_NaN());

    Spectrum spec;
    spec.n_levels = k;
    spec.levels_ghz.resize(k);
    spec.states = solver.eigenvectors().leftCols(k);
    for (int i = 0; i < k; ++i) spec.levels_ghz[i] = solver.eigenvalues()[i];

    // residual guard ‖Hv − Ev‖ ≤ 1e-8 ‖H‖ per pair
    const double h_norm = scale;
    for (int i = 0; i < k; ++i) {
        const double res =
            (dense * spec.states.col(i) - spec.levels_ghz[i] * spec.states.col(i)).norm();
        if (res > 1e-8 * std::max(h_norm, 1.0))
            throw SolverError("eigensolve: residual above bound", res);
    }
    return spec;
}

Spectrum solve(const CircuitParams& params, const BasisConfig& basis, int k) {
    Spectrum spec = eigensolve(build_hamiltonian(params, basis), k);
    spec.flux = params.flux;
    spec.basis = basis;
    return spec;
}

Transitions transitions(const Spectrum& spec) {
    if (spec.n_levels < 3) throw ConfigError("transitions: need at least 3 levels");
    Transitions t;
    t.w_ge_ghz = spec.levels_ghz[1] - spec.levels_ghz[0];
    t.w_ef_ghz = spec.levels_ghz[2] - spec.levels_ghz[1];
    t.w_gf_ghz = spec.levels_ghz[2] - spec.levels_ghz[0];
    t.anharm_ghz = t.w_ef_ghz - t.w_ge_ghz;
    return t;
}

std::vector<SweepRow> flux_sweep(const CircuitParams& params, const std::vector<double>& flux_grid,
                                 int k, const BasisConfig& basis) {
    if (flux_grid.empty()) throw ConfigError("flux_sweep: empty grid");
    for (double f : flux_grid)
        if (!finite(f)) throw ConfigError("flux_sweep: non-finite flux value");

    std::vector<SweepRow> rows(flux_grid.size());
    std::vector<std::string> failures(flux_grid.size());
    parallel::parallel_for(flux_grid.size(), [&](std::size_t i) {
        CircuitParams p = params;
        p.flux = flux_grid[i];
        try {
            const Spectrum spec = solve(p, basis, std::max(k, 3));
            const Transitions t = transitions(spec);
            rows[i] = {p.flux, t.w_ge_ghz, t.w_gf_ghz, t.anharm_ghz};
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw SolverError("flux_sweep: row " + std::to_string(i) + " failed: " + failures[i]);
    return rows;
}

double matrix_element(const Spectrum& spec, ChargeOp op, int i, int j) {
    if (i < 0 || j < 0 || i >= spec.n_levels || j >= spec.n_levels)
        throw ConfigError("matrix_element: level index out of range");
    std::complex<double> acc = 0.0;
    const auto dim = static_cast<long>(spec.basis.dimension());
    for (long r = 0; r < dim; ++r) {
        const auto [np, nm] = spec.basis.charges_at(r);
        const double charge = (op == ChargeOp::M) ? nm : np;
        acc += std::conj(spec.states(r, i)) * charge * spec.states(r, j);
    }
    return std::abs(acc);
}

namespace {

double get_param(const CircuitParams& p, const std::string& name) {
    if (name == "ej") return p.ej_ghz;
    if (name == "ec") return p.ec_ghz;
    if (name == "alpha") return p.alpha;
    if (name == "beta") return p.beta;
    throw ConfigError("fit_parameters: unknown parameter '" + name + "'");
}

void set_param(CircuitParams& p, const std::string& name, double v) {
    if (name == "ej")
        p.ej_ghz = v;
    else if (name == "ec")
        p.ec_ghz = v;
    else if (name == "alpha")
        p.alpha = v;
    else if (name == "beta")
        p.beta = v;
    else
        throw ConfigError("fit_parameters: unknown parameter '" + name + "'");
}

}  // namespace

FitReport fit_parameters(const FitTargets& targets, const FitOptions& options) {
    if (!(targets.w_ge_ghz > 0.0) || !(targets.anharm_ghz > 0.0))
        throw ConfigError("fit_parameters: targets must be positive");
    const std::size_t n_free = options.free.size();
    if (n_free > 2)
        throw ConfigError("fit_parameters: under-determined (more free parameters than targets)");
    if (n_free == 0) throw ConfigError("fit_parameters: no free parameters");

    CircuitParams p = options.initial;
    for (const auto& [name, value] : options.fixed) set_param(p, name, value);
    p.flux = targets.flux;

    const auto residual = [&](const CircuitParams& q) {
        const Transitions t = transitions(solve(q, options.basis, options.levels));
        return std::array<double, 2>{t.w_ge_ghz - targets.w_ge_ghz,
                                     t.anharm_ghz - targets.anharm_ghz};
    };

    FitReport report;
    auto r = residual(p);
    for (int it = 0;; ++it) {
        report.iterations = it;
        report.residual_w_ge_ghz = r[0];
        report.residual_anharm_ghz = r[1];
        if (std::abs(r[0]) <= options.tol_w_ge_ghz && std::abs(r[1]) <= options.tol_anharm_ghz) {
            report.params = p;
            return report;
        }
        if (it >= options.max_iterations)
            throw SolverError("fit_parameters: no convergence; best residuals (GHz) " +
                                  std::to_string(r[0]) + ", " + std::to_string(r[1]),
                              std::hypot(r[0], r[1]));

        // finite-difference Jacobian, relative steps
        Eigen::MatrixXd jac(2, static_cast<Eigen::Index>(n_free));
        for (std::size_t c = 0; c < n_free; ++c) {
            const double v = get_param(p, options.free[c]);
            const double h = std::max(std::abs(v), 1e-3) * 1e-4;
            CircuitParams q = p;
            set_param(q, options.free[c], v + h);
            const auto rp = residual(q);
            jac(0, static_cast<Eigen::Index>(c)) = (rp[0] - r[0]) / h;
            jac(1, static_cast<Eigen::Index>(c)) = (rp[1] - r[1]) / h;
        }

        const Eigen::Vector2d rv(r[0], r[1]);
        const Eigen::VectorXd step =
            jac.completeOrthogonalDecomposition().solve(rv);

        // damped update with a simple backtracking guard
        double lambda = 1.0;
        for (int bt = 0;; ++bt) {
            CircuitParams q = p;
            bool ok = true;
            for (std::size_t c = 0; c < n_free; ++c) {
                const double v =
                    get_param(p, options.free[c]) - lambda * step(static_cast<Eigen::Index>(c));
                set_param(q, options.free[c], v);
                if ((options.free[c] == "ej" || options.free[c] == "ec") && v <= 0.0) ok = false;
                if (options.free[c] == "alpha" && !(v > 0.0 && v < 1.0)) ok = false;
                if (options.free[c] == "beta" && v < 0.0) ok = false;
            }
            if (ok) {
                const auto rq = residual(q);
                if (std::hypot(rq[0], rq[1]) < std::hypot(r[0], r[1]) || bt >= 6) {
                    p = q;
                    r = rq;
                    break;
                }
            }
            lambda *= 0.5;
            if (bt >= 12)
                throw SolverError("fit_parameters: step search failed",
                                  std::hypot(r[0], r[1]));
        }
    }
}

}  // namespace csfq::circuit
