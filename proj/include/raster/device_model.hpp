#pragma once

#include "raster/device.hpp"

// Closed-form performance figures of the deflector system. All functions are
// pure; specs are taken by const reference and never modified.
namespace raster::model {

// Deflection angle theta = lambda * f / v. Monotone increasing in f.
// Frequencies outside the usable band are legal here; callers that care
// should check within_usable_band first.
double deflection_angle(const BeamSpec& beam, const AodSpec& aod, double freq_hz);

bool within_usable_band(const AodSpec& aod, double freq_hz);

// Acoustic transit time across the beam: 2*w0/v for a single AOD. The
// counter-propagating pair (element_count = 2) only needs to cover half the
// beam diameter, halving it.
double access_time(const BeamSpec& beam, const AodSpec& aod, int element_count);

// N_stat = (pi/4) * T_a * dF. t_access_s must always be the single-AOD
// access time; the DAOD doubling applies to N itself, not to T_a.
double static_resolution(double t_access_s, double bandwidth_hz, int element_count);

// Angular spread of the deflected beam under a linear chirp:
//   (2/pi)(lambda/w0) + (lambda/v) * dF,
// where dF is the span of frequencies simultaneously inside the crystal.
// For a linear chirp the caller passes dF = alpha * T_a.
double chirp_spread(const BeamSpec& beam, const AodSpec& aod, double inst_freq_span_hz);

// N / (1 + N * T_a / T_scan) + 1. T_scan <= 0 gives the pure diffraction
// limit of 1 (not an error).
double dynamic_resolution_aod(double n_stat, double t_access_s, double t_scan_s);

// 2N / (1 + T_a / T_scan) + 1, with N and T_a the single-AOD values.
double dynamic_resolution_daod(double n_stat_single, double t_access_single_s,
                               double t_scan_s);

// Cylindrical-lens focal length of the chirp, a^2 v^2 / (lambda * alpha).
// alpha = 0 returns +infinity (no lensing); the sign follows alpha.
double acoustic_focal_length(const BeamSpec& beam, const AodSpec& aod,
                             double alpha_hz_per_s);
bool has_lensing(double focal_length_m);

// Focal shift of the relay given the acoustic lens: -f_obj^2 / f_aod.
// An infinite f_aod gives 0.
double focal_shift(double objective_focal_m, double acoustic_focal_m);

struct VipaMetrics {
    double resolution;     // FSR / FWHM
    double switch_time_s;  // linewidth-limited switching time
};

// switch_time = switch_time_factor / FWHM. The factor is an overridable
// modeling constant; the default 1.0 reproduces the ~1 ns scale of a
// 1.2 GHz linewidth.
VipaMetrics vipa_metrics(const VipaSpec& vipa, double switch_time_factor = 1.0);

// Linearized frequency-to-row map of the VIPA output:
//   row = (f mod FSR) / FSR * n_rows.
double sideband_position(const VipaSpec& vipa, double f_sideband_hz, int n_rows);

// Exact inverse of sideband_position on [0, n_rows).
double row_to_frequency(const VipaSpec& vipa, double row, int n_rows);

}  // namespace raster::model
