#pragma once

// Two-dimensional C-shunt flux-qubit circuit model in the tensor-product
// charge basis: plane waves exp(i n φ) with n ∈ [−n_max, n_max] in each of
// the periodic coordinates (φ_p, φ_m). Energies in GHz (h = 1), flux as the
// dimensionless f = Φ_ext/Φ_0.
//
// The (φ_p, φ_m) torus double-covers the physical junction-phase torus
// (φ_1, φ_2) = (φ_p + φ_m, φ_p − φ_m); single-valuedness there keeps only
// charge states with n_p + n_m even. Every Hamiltonian term preserves that
// sublattice, so the basis is restricted to it — the odd sector is a gauge
// copy whose spurious near-degenerate ground state would otherwise sit
// inside the spectrum.

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace csfq::circuit {

struct CircuitParams {
    double ej_ghz = 0.0;   // Josephson energy of each large junction
    double ec_ghz = 0.0;   // single-junction charging energy e²/(2 C_J)
    double alpha = 0.0;    // small-junction scale
    double beta = 0.0;     // shunt ratio C_sh / C_J
    double flux = 0.5;     // reduced external flux f

    void validate() const;
    /// flux reduced into [0, 1) for reporting.
    double reduced_flux() const;
};

struct BasisConfig {
    int n_max = 15;

    /// Physical Hilbert-space dimension: lattice points with n_p + n_m even.
    std::size_t dimension() const;
    void validate() const;

    /// Compact index of (n_p, n_m), or -1 if outside the physical lattice.
    /// Indices are assigned in (n_p, n_m) lexicographic order.
    long index_of(int np, int nm) const;
    /// Inverse of index_of.
    std::pair<int, int> charges_at(long index) const;
};

using SparseH = Eigen::SparseMatrix<std::complex<double>>;

/// H = K + V in the charge basis. Kinetic part diagonal, potential terms act
/// as ±1 shifts in both coordinates and flux-phased ±2 shifts in n_m.
SparseH build_hamiltonian(const CircuitParams& params, const BasisConfig& basis);

struct Spectrum {
    double flux = 0.0;
    BasisConfig basis;
    std::vector<double> levels_ghz;  // ascending
    Eigen::MatrixXcd states;         // one column per level
    int n_levels = 0;
};

/// Lowest k eigenpairs, ascending and orthonormal. Residual-checked.
Spectrum eigensolve(const SparseH& h, int k);
Spectrum solve(const CircuitParams& params, const BasisConfig& basis, int k);

struct Transitions {
    double w_ge_ghz = 0.0;
    double w_ef_ghz = 0.0;
    double w_gf_ghz = 0.0;
    double anharm_ghz = 0.0;
};

Transitions transitions(const Spectrum& spec);

struct SweepRow {
    double flux = 0.0;
    double w_ge_ghz = 0.0;
    double w_gf_ghz = 0.0;
    double anharm_ghz = 0.0;
};

/// One row per flux point, output order matches input order. Rows solve
/// independently and may run on the configured thread pool.
std::vector<SweepRow> flux_sweep(const CircuitParams& params, const std::vector<double>& flux_grid,
                                 int k, const BasisConfig& basis);

enum class ChargeOp { M, P };

/// |⟨i| n̂ |j⟩| for the diagonal charge-number operator of one coordinate.
double matrix_element(const Spectrum& spec, ChargeOp op, int i, int j);

struct FitTargets {
    double w_ge_ghz = 2.661;
    double anharm_ghz = 0.848;
    double flux = 0.5;
};

struct FitOptions {
    std::map<std::string, double> fixed;  // any of ej, ec, alpha, beta
    std::vector<std::string> free;        // remaining parameters to adjust
    CircuitParams initial;
    BasisConfig basis;
    int levels = 3;
    int max_iterations = 40;
    double tol_w_ge_ghz = 1e-3;
    double tol_anharm_ghz = 2e-3;
};

struct FitReport {
    CircuitParams params;
    double residual_w_ge_ghz = 0.0;
    double residual_anharm_ghz = 0.0;
    int iterations = 0;
};

/// Finite-difference Gauss–Newton over repeated eigensolves. Rejects
/// under-determined setups (more free parameters than targets).
FitReport fit_parameters(const FitTargets& targets, const FitOptions& options);

}  // namespace csfq::circuit
