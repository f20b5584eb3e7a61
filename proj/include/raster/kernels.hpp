#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Data-parallel inner loops of the wave-optics pipeline. Each operation has
// a scalar reference implementation and, where the hardware supports it, a
// SIMD variant selected at runtime. Variants are equivalence-tested against
// the scalar reference.
namespace raster::kernels {

enum class Backend { scalar, avx2, neon };

struct Ops {
    const char* name;
    // dst[i] = |src[i]|^2
    void (*magnitude_squared)(const std::complex<double>* src, double* dst,
                              std::size_t n);
    double (*sum)(const double* src, std::size_t n);
    double (*max_value)(const double* src, std::size_t n);
    void (*scale)(double* data, std::size_t n, double factor);
};

const Ops& scalar_ops();

// Ops table for a specific backend, or nullptr when the CPU lacks it.
const Ops* ops_for(Backend backend);

std::vector<Backend> available_backends();

// Active table: best available backend unless overridden with select().
const Ops& active();
void select(Backend backend);  // throws std::runtime_error if unavailable
void reset();                  // back to automatic selection

}  // namespace raster::kernels
