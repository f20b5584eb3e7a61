// AVX2 variants of the wave-optics inner loops. Guarded at runtime by a CPU
// feature check; kernels.cpp falls back to the scalar reference otherwise.
#include <immintrin.h>

#include "raster/kernels.hpp"

namespace raster::kernels {

namespace {

void magnitude_squared_avx2(const std::complex<double>* src, double* dst,
                            std::size_t n) {
    const double* p = reinterpret_cast<const double*>(src);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // [r0 i0 r1 i1], [r2 i2 r3 i3]
        __m256d a = _mm256_loadu_pd(p + 2 * i);
        __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
        __m256d sa = _mm256_mul_pd(a, a);
        __m256d sb = _mm256_mul_pd(b, b);
        // hadd -> [m0 m2 m1 m3]; permute back to [m0 m1 m2 m3]
        __m256d h = _mm256_hadd_pd(sa, sb);
        h = _mm256_permute4x64_pd(h, 0b11011000);
        _mm256_storeu_pd(dst + i, h);
    }
    for (; i < n; ++i) {
        const double re = src[i].real();
        const double im = src[i].imag();
        dst[i] = re * re + im * im;
    }
}

double sum_avx2(const double* src, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(src + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) total += src[i];
    return total;
}

double max_value_avx2(const double* src, std::size_t n) {
    std::size_t i = 0;
    double m = src[0];
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(src);
        for (i = 4; i + 4 <= n; i += 4)
            acc = _mm256_max_pd(acc, _mm256_loadu_pd(src + i));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        m = lanes[0];
        for (int k = 1; k < 4; ++k)
            if (lanes[k] > m) m = lanes[k];
    }
    for (; i < n; ++i)
        if (src[i] > m) m = src[i];
    return m;
}

void scale_avx2(double* data, std::size_t n, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(data + i, _mm256_mul_pd(_mm256_loadu_pd(data + i), f));
    for (; i < n; ++i) data[i] *= factor;
}

constexpr Ops kAvx2Ops{"avx2", magnitude_squared_avx2, sum_avx2, max_value_avx2,
                       scale_avx2};

}  // namespace

const Ops* avx2_ops() {
    return __builtin_cpu_supports("avx2") ? &kAvx2Ops : nullptr;
}

}  // namespace raster::kernels
