#pragma once

// Low-level array kernels behind the propagator inner loops.
//
// Complex arrays are interleaved (re, im) doubles. Every kernel exists as a
// scalar reference implementation and, on x86-64 hosts with AVX2, a SIMD
// variant selected at runtime. Both paths evaluate the same expression tree
// per element (no FMA, no reassociation), so their outputs are bit-identical;
// the equivalence tests assert exactly that.

#include <complex>
#include <cstddef>

namespace csfq::kernels {

using cd = std::complex<double>;

struct Ops {
    // y[i] += a * x[i]
    void (*caxpy)(cd* y, cd a, const cd* x, std::size_t n);
    // y[i] = a * x[i]
    void (*cscale)(cd* y, cd a, const cd* x, std::size_t n);
    // y[i] = x0[i] + h * k[i], elementwise over 2n doubles
    void (*axpy_real)(cd* y, const cd* x0, double h, const cd* k, std::size_t n);
    // y[i] = x0[i] + c * ((k1[i] + 2 k2[i]) + (2 k3[i] + k4[i]))
    void (*rk4_combine)(cd* y, const cd* x0, double c, const cd* k1, const cd* k2,
                        const cd* k3, const cd* k4, std::size_t n);
    const char* name;
};

/// Scalar reference kernels (always available).
const Ops& scalar_ops();

/// AVX2 kernels, or nullptr when the host CPU lacks AVX2.
const Ops* avx2_ops();

/// Kernels used by the library: best available unless the CSFQ_KERNEL
/// environment variable ("scalar" or "avx2") forces a path.
const Ops& active();

}  // namespace csfq::kernels
