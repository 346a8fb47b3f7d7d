#include "csfq/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace csfq::kernels {

namespace avx2 {

// 4 doubles = 2 complex per vector. a*x via mul/mul/addsub: even lanes get
// ar*xr - ai*xi, odd lanes ar*xi + ai*xr — the same two-op sequence as the
// scalar reference.
static inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d x) {
    const __m256d xs = _mm256_permute_pd(x, 0x5);  // swap re/im pairwise
    return _mm256_addsub_pd(_mm256_mul_pd(ar, x), _mm256_mul_pd(ai, xs));
}

static void caxpy(cd* y, cd a, const cd* x, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    double* yd = reinterpret_cast<double*>(y);
    const double* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d p = cmul_broadcast(ar, ai, _mm256_loadu_pd(xd + 2 * i));
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), p));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double pr = a.real() * xr - a.imag() * xi;
        const double pi = a.real() * xi + a.imag() * xr;
        y[i] = cd(y[i].real() + pr, y[i].imag() + pi);
    }
}

static void cscale(cd* y, cd a, const cd* x, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    double* yd = reinterpret_cast<double*>(y);
    const double* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(yd + 2 * i, cmul_broadcast(ar, ai, _mm256_loadu_pd(xd + 2 * i)));
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cd(a.real() * xr - a.imag() * xi, a.real() * xi + a.imag() * xr);
    }
}

static void axpy_real(cd* y, const cd* x0, double h, const cd* k, std::size_t n) {
    const __m256d hv = _mm256_set1_pd(h);
    const double* x0d = reinterpret_cast<const double*>(x0);
    const double* kd = reinterpret_cast<const double*>(k);
    double* yd = reinterpret_cast<double*>(y);
    const std::size_t m = 2 * n;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d t = _mm256_mul_pd(hv, _mm256_loadu_pd(kd + i));
        _mm256_storeu_pd(yd + i, _mm256_add_pd(_mm256_loadu_pd(x0d + i), t));
    }
    for (; i < m; ++i) yd[i] = x0d[i] + h * kd[i];
}

static void rk4_combine(cd* y, const cd* x0, double c, const cd* k1, const cd* k2,
                        const cd* k3, const cd* k4, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    const double* x0d = reinterpret_cast<const double*>(x0);
    const double* k1d = reinterpret_cast<const double*>(k1);
    const double* k2d = reinterpret_cast<const double*>(k2);
    const double* k3d = reinterpret_cast<const double*>(k3);
    const double* k4d = reinterpret_cast<const double*>(k4);
    double* yd = reinterpret_cast<double*>(y);
    const std::size_t m = 2 * n;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(k1d + i),
                                        _mm256_mul_pd(two, _mm256_loadu_pd(k2d + i)));
        const __m256d b = _mm256_add_pd(_mm256_mul_pd(two, _mm256_loadu_pd(k3d + i)),
                                        _mm256_loadu_pd(k4d + i));
        const __m256d t = _mm256_add_pd(a, b);
        _mm256_storeu_pd(yd + i, _mm256_add_pd(_mm256_loadu_pd(x0d + i), _mm256_mul_pd(cv, t)));
    }
    for (; i < m; ++i) {
        const double t = (k1d[i] + 2.0 * k2d[i]) + (2.0 * k3d[i] + k4d[i]);
        yd[i] = x0d[i] + c * t;
    }
}

}  // namespace avx2

const Ops* avx2_ops() {
    static const Ops ops{avx2::caxpy, avx2::cscale, avx2::axpy_real, avx2::rk4_combine,
                         "avx2"};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &ops : nullptr;
}

}  // namespace csfq::kernels

#else

namespace csfq::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace csfq::kernels

#endif
