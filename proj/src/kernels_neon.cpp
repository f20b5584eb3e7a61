// NEON variants of the wave-optics inner loops (aarch64).
#include <arm_neon.h>

#include "raster/kernels.hpp"

namespace raster::kernels {

namespace {

void magnitude_squared_neon(const std::complex<double>* src, double* dst,
                            std::size_t n) {
    const double* p = reinterpret_cast<const double*>(src);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t a = vld1q_f64(p + 2 * i);      // [r0 i0]
        float64x2_t b = vld1q_f64(p + 2 * i + 2);  // [r1 i1]
        float64x2_t sa = vmulq_f64(a, a);
        float64x2_t sb = vmulq_f64(b, b);
        dst[i] = vaddvq_f64(sa);
        dst[i + 1] = vaddvq_f64(sb);
    }
    for (; i < n; ++i) {
        const double re = src[i].real();
        const double im = src[i].imag();
        dst[i] = re * re + im * im;
    }
}

double sum_neon(const double* src, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(src + i));
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += src[i];
    return total;
}

double max_value_neon(const double* src, std::size_t n) {
    std::size_t i = 0;
    double m = src[0];
    if (n >= 2) {
        float64x2_t acc = vld1q_f64(src);
        for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(src + i));
        m = vmaxvq_f64(acc);
    }
    for (; i < n; ++i)
        if (src[i] > m) m = src[i];
    return m;
}

void scale_neon(double* data, std::size_t n, double factor) {
    const float64x2_t f = vdupq_n_f64(factor);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(data + i, vmulq_f64(vld1q_f64(data + i), f));
    for (; i < n; ++i) data[i] *= factor;
}

constexpr Ops kNeonOps{"neon", magnitude_squared_neon, sum_neon, max_value_neon,
                       scale_neon};

}  // namespace

const Ops* neon_ops() { return &kNeonOps; }

}  // namespace raster::kernels
