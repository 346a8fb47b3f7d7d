#pragma once

// Small dense complex matrices (qubit/qutrit scale) and superoperators.
// Row operations route through the runtime-selected kernels; matrix products
// accumulate row-by-row in fixed k order so results do not depend on the
// kernel path chosen.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "csfq/kernels.hpp"

namespace csfq::linalg {

using cd = std::complex<double>;

/// Row-major n×n complex matrix.
struct CMat {
    int n = 0;
    std::vector<cd> a;

    CMat() = default;
    explicit CMat(int n) : n(n), a(static_cast<std::size_t>(n) * n) {}

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    cd& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const cd& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    cd* row(int i) { return a.data() + static_cast<std::size_t>(i) * n; }
    const cd* row(int i) const { return a.data() + static_cast<std::size_t>(i) * n; }

    void set_zero() { std::fill(a.begin(), a.end(), cd(0.0)); }
};

/// out = m1 * m2
inline void mul_into(CMat& out, const CMat& m1, const CMat& m2) {
    assert(m1.n == m2.n && out.n == m1.n);
    const auto& k = kernels::active();
    out.set_zero();
    for (int i = 0; i < m1.n; ++i)
        for (int j = 0; j < m1.n; ++j) k.caxpy(out.row(i), m1(i, j), m2.row(j), m2.n);
}

inline CMat mul(const CMat& m1, const CMat& m2) {
    CMat out(m1.n);
    mul_into(out, m1, m2);
    return out;
}

inline CMat dagger(const CMat& m) {
    CMat out(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out(i, j) = std::conj(m(j, i));
    return out;
}

inline cd trace(const CMat& m) {
    cd t = 0.0;
    for (int i = 0; i < m.n; ++i) t += m(i, i);
    return t;
}

inline double max_abs(const CMat& m) {
    double v = 0.0;
    for (const auto& x : m.a) v = std::max(v, std::abs(x));
    return v;
}

/// max_ij |(m1 - m2)_ij|
inline double max_abs_diff(const CMat& m1, const CMat& m2) {
    assert(m1.n == m2.n);
    double v = 0.0;
    for (std::size_t i = 0; i < m1.a.size(); ++i) v = std::max(v, std::abs(m1.a[i] - m2.a[i]));
    return v;
}

/// ‖m† m − I‖_max
inline double unitarity_defect(const CMat& m) {
    const CMat p = mul(dagger(m), m);
    double v = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) v = std::max(v, std::abs(p(i, j) - (i == j ? cd(1.0) : cd(0.0))));
    return v;
}

/// Superoperator on d×d density matrices, stored column-major over the
/// row-major flattening vec(ρ)[i*d+j] = ρ_ij. Column-major keeps apply() a
/// chain of contiguous caxpys.
struct Superop {
    int d = 0;                // Hilbert dimension
    std::vector<cd> col;      // D*D entries, D = d², col-major

    Superop() = default;
    explicit Superop(int d) : d(d), col(static_cast<std::size_t>(d) * d * d * d) {}

    int dim() const { return d * d; }

    cd& at(int row, int column) { return col[static_cast<std::size_t>(column) * dim() + row]; }
    const cd& at(int row, int column) const {
        return col[static_cast<std::size_t>(column) * dim() + row];
    }

    static Superop identity(int d) {
        Superop s(d);
        for (int i = 0; i < d * d; ++i) s.at(i, i) = 1.0;
        return s;
    }

    /// out = S · v (v is vec(ρ), length d²)
    void apply(cd* out, const cd* v) const {
        const int D = dim();
        const auto& k = kernels::active();
        for (int i = 0; i < D; ++i) out[i] = 0.0;
        for (int c = 0; c < D; ++c)
            k.caxpy(out, v[c], col.data() + static_cast<std::size_t>(c) * D, D);
    }

    CMat apply_to(const CMat& rho) const {
        assert(rho.n == d);
        CMat out(d);
        apply(out.a.data(), rho.a.data());
        return out;
    }
};

/// this ∘ other as maps: (compose(s2, s1))(ρ) = s2(s1(ρ))
inline Superop compose(const Superop& s2, const Superop& s1) {
    assert(s2.d == s1.d);
    const int D = s1.dim();
    Superop out(s1.d);
    // column c of out = s2 · (column c of s1)
    for (int c = 0; c < D; ++c)
        s2.apply(out.col.data() + static_cast<std::size_t>(c) * D,
                 s1.col.data() + static_cast<std::size_t>(c) * D);
    return out;
}

}  // namespace csfq::linalg
