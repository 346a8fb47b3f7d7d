#include "csfq/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace csfq::kernels {

namespace scalar {

// Complex multiply written out so the rounding sequence matches the SIMD
// mul/mul/addsub form exactly.
static void caxpy(cd* y, cd a, const cd* x, std::size_t n) {
    const double ar = a.real(), ai = a.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double pr = ar * xr - ai * xi;
        const double pi = ar * xi + ai * xr;
        y[i] = cd(y[i].real() + pr, y[i].imag() + pi);
    }
}

static void cscale(cd* y, cd a, const cd* x, std::size_t n) {
    const double ar = a.real(), ai = a.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cd(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

static void axpy_real(cd* y, const cd* x0, double h, const cd* k, std::size_t n) {
    const double* x0d = reinterpret_cast<const double*>(x0);
    const double* kd = reinterpret_cast<const double*>(k);
    double* yd = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < 2 * n; ++i) yd[i] = x0d[i] + h * kd[i];
}

static void rk4_combine(cd* y, const cd* x0, double c, const cd* k1, const cd* k2,
                        const cd* k3, const cd* k4, std::size_t n) {
    const double* x0d = reinterpret_cast<const double*>(x0);
    const double* k1d = reinterpret_cast<const double*>(k1);
    const double* k2d = reinterpret_cast<const double*>(k2);
    const double* k3d = reinterpret_cast<const double*>(k3);
    const double* k4d = reinterpret_cast<const double*>(k4);
    double* yd = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const double t = (k1d[i] + 2.0 * k2d[i]) + (2.0 * k3d[i] + k4d[i]);
        yd[i] = x0d[i] + c * t;
    }
}

}  // namespace scalar

const Ops& scalar_ops() {
    static const Ops ops{scalar::caxpy, scalar::cscale, scalar::axpy_real,
                         scalar::rk4_combine, "scalar"};
    return ops;
}

const Ops& active() {
    static const Ops& chosen = [sel = std::getenv("CSFQ_KERNEL")]() -> const Ops& {
        if (sel != nullptr) {
            const std::string s(sel);
            if (s == "scalar") return scalar_ops();
            if (s == "avx2") {
                const Ops* v = avx2_ops();
                if (v == nullptr) throw std::runtime_error("CSFQ_KERNEL=avx2: host CPU lacks AVX2");
                return *v;
            }
            throw std::runtime_error("CSFQ_KERNEL: unknown value '" + s + "'");
        }
        const Ops* v = avx2_ops();
        return v != nullptr ? *v : scalar_ops();
    }();
    return chosen;
}

}  // namespace csfq::kernels
