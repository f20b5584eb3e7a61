#include "raster/kernels.hpp"

#include <stdexcept>

namespace raster::kernels {

namespace {

void magnitude_squared_scalar(const std::complex<double>* src, double* dst,
                              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = src[i].real();
        const double im = src[i].imag();
        dst[i] = re * re + im * im;
    }
}

double sum_scalar(const double* src, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += src[i];
    return acc;
}

double max_value_scalar(const double* src, std::size_t n) {
    double m = src[0];
    for (std::size_t i = 1; i < n; ++i)
        if (src[i] > m) m = src[i];
    return m;
}

void scale_scalar(double* data, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) data[i] *= factor;
}

constexpr Ops kScalarOps{"scalar", magnitude_squared_scalar, sum_scalar,
                         max_value_scalar, scale_scalar};

const Ops* g_selected = nullptr;

const Ops* best_available() {
#if defined(RASTER_HAVE_AVX2)
    if (const Ops* ops = ops_for(Backend::avx2)) return ops;
#endif
#if defined(RASTER_HAVE_NEON)
    if (const Ops* ops = ops_for(Backend::neon)) return ops;
#endif
    return &kScalarOps;
}

}  // namespace

#if defined(RASTER_HAVE_AVX2)
const Ops* avx2_ops();  // kernels_avx2.cpp
#endif
#if defined(RASTER_HAVE_NEON)
const Ops* neon_ops();  // kernels_neon.cpp
#endif

const Ops& scalar_ops() { return kScalarOps; }

const Ops* ops_for(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return &kScalarOps;
        case Backend::avx2:
#if defined(RASTER_HAVE_AVX2)
            return avx2_ops();
#else
            return nullptr;
#endif
        case Backend::neon:
#if defined(RASTER_HAVE_NEON)
            return neon_ops();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (ops_for(Backend::avx2)) out.push_back(Backend::avx2);
    if (ops_for(Backend::neon)) out.push_back(Backend::neon);
    return out;
}

const Ops& active() {
    if (g_selected) return *g_selected;
    static const Ops* best = best_available();
    return *best;
}

void select(Backend backend) {
    const Ops* ops = ops_for(backend);
    if (!ops) throw std::runtime_error("kernels: requested backend is unavailable");
    g_selected = ops;
}

void reset() { g_selected = nullptr; }

}  // namespace raster::kernels
