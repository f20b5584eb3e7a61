#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "raster/device.hpp"

// Independent wave-optics verification of the closed-form model: builds the
// chirped acoustic phase profile across the aperture, computes the far field
// by discrete Fourier transform, and extracts spot widths and knife-edge
// fall times.
namespace raster::oracle {

struct GridParams {
    std::size_t sample_count = 8192;  // power of two, >= 1024
    double extent_m = 0.0;            // 0 -> 8 * w0; must be >= 6 * w0
    std::size_t pad_factor = 8;       // zero-padding of the DFT for angular resolution
};

// Sampled complex field across the deflector aperture.
struct FieldProfile {
    std::vector<std::complex<double>> samples;
    double extent_m = 0.0;
    double wavelength_m = 0.0;
    std::size_t pad_factor = 8;
    double dx_m() const { return extent_m / static_cast<double>(samples.size()); }
    double power() const;  // sum |E|^2 dx
};

struct FarField {
    std::vector<double> intensity;  // normalized so max = 1
    std::vector<double> angle_rad;  // strictly increasing, symmetric about 0
    double peak_intensity = 0.0;    // pre-normalization peak
    double total_power = 0.0;       // sum |F|^2 dnu, equals field power (Parseval)
};

// Gaussian amplitude exp(-x^2/w0^2), hard-truncated at +/- aperture/2, with
// the traveling-grating phase
//   phi(x) = (2 pi / v) [ f(t) x - direction * alpha x^2 / (2 v) ].
// direction is the acoustic propagation sign (+1 or -1). Throws if the grid
// cannot resolve the steepest fringe with >= 4 samples.
FieldProfile build_aperture_field(const BeamSpec& beam, const AodSpec& aod,
                                  const ChirpScan& chirp, double t_s, int direction,
                                  const GridParams& grid = {});

// Both AODs as coincident thin elements: phases of the +1 and -1 directions
// add, the quadratic (lensing) terms cancel exactly and the linear
// deflections add.
FieldProfile build_daod_field(const BeamSpec& beam, const AodSpec& aod,
                              const ChirpScan& chirp, double t_s,
                              const GridParams& grid = {});

// Gaussian beam with no grating phase; used for analytic cross-checks.
FieldProfile build_gaussian_field(const BeamSpec& beam, const GridParams& grid = {});

// Fraunhofer far field: intensity = |DFT|^2 on the angle axis theta = lambda * nu.
FarField far_field(const FieldProfile& field);

struct WaistMeasurement {
    double half_width_rad = 0.0;  // half-width at 1/e^2 of peak, interpolated
    bool multi_lobe = false;      // more than one contiguous interval above threshold
};

// Width of the widest contiguous interval above peak/e^2. multi_lobe flags
// ambiguous profiles.
WaistMeasurement measure_waist_1e2(const FarField& far);

// Interpolated angle of the intensity maximum (parabolic refinement).
double peak_angle(const FarField& far);

enum class Architecture { single_aod, daod };

struct KnifeEdgeTrace {
    std::vector<double> time_s;
    std::vector<double> transmitted;  // fraction of power beyond the knife
    double knife_angle_rad = 0.0;
    double fall_time_1e2_s = 0.0;  // between the e^-2 and 1-e^-2 crossings
};

// Sweeps the chirp across a knife edge fixed at the mid-scan deflection
// angle and extracts the 1/e^2 fall duration. Throws if the transmitted
// power never crosses both levels.
KnifeEdgeTrace knife_edge_trace(const DeviceSpec& device, const ChirpScan& chirp,
                                std::size_t t_samples,
                                Architecture arch = Architecture::daod,
                                const GridParams& grid = {});

struct SweepRow {
    double alpha_hz_per_s = 0.0;
    double t_scan_s = 0.0;
    double width_oracle_rad = 0.0;  // full 1/e^2 width at mid-scan
    double width_eq_s1_rad = 0.0;   // chirp_spread at dF = alpha * T_a
    double n_dyn_oracle = 0.0;
    double n_dyn_closed_form = 0.0;
    std::string device;  // "aod" or "daod"
};

// One row per (alpha, architecture): far-field width at mid-scan plus the
// dynamic resolution from the oracle and from the closed forms. t_scan is
// usable_bandwidth / alpha (the full-band sweep at that chirp rate).
std::vector<SweepRow> resolution_sweep(const DeviceSpec& device,
                                       const std::vector<double>& alphas_hz_per_s,
                                       const GridParams& grid = {});

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace raster::oracle
