#include "raster/device_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace raster::model {

namespace {
constexpr double kPi = std::numbers::pi;
}

double deflection_angle(const BeamSpec& beam, const AodSpec& aod, double freq_hz) {
    if (!std::isfinite(freq_hz))
        throw std::invalid_argument("deflection_angle: non-finite frequency");
    return beam.wavelength_m * freq_hz / aod.acoustic_velocity_m_per_s;
}

bool within_usable_band(const AodSpec& aod, double freq_hz) {
    const double half = aod.usable_bandwidth_hz / 2.0;
    return freq_hz >= aod.center_freq_hz - half && freq_hz <= aod.center_freq_hz + half;
}

double access_time(const BeamSpec& beam, const AodSpec& aod, int element_count) {
    if (element_count != 1 && element_count != 2)
        throw std::invalid_argument("access_time: element count must be 1 or 2");
    const double single = 2.0 * beam.waist_w0_m / aod.acoustic_velocity_m_per_s;
    return element_count == 1 ? single : single / 2.0;
}

double static_resolution(double t_access_s, double bandwidth_hz, int element_count) {
    if (element_count != 1 && element_count != 2)
        throw std::invalid_argument("static_resolution: element count must be 1 or 2");
    const double n_single = (kPi / 4.0) * t_access_s * bandwidth_hz;
    return element_count == 1 ? n_single : 2.0 * n_single;
}

double chirp_spread(const BeamSpec& beam, const AodSpec& aod, double inst_freq_span_hz) {
    if (beam.waist_w0_m <= 0)
        throw std::domain_error("chirp_spread: singular beam (waist = 0)");
    return (2.0 / kPi) * (beam.wavelength_m / beam.waist_w0_m) +
           (beam.wavelength_m / aod.acoustic_velocity_m_per_s) * inst_freq_span_hz;
}

double dynamic_resolution_aod(double n_stat, double t_access_s, double t_scan_s) {
    if (t_scan_s <= 0) return 1.0;  // pure diffraction limit
    return n_stat / (1.0 + n_stat * t_access_s / t_scan_s) + 1.0;
}

double dynamic_resolution_daod(double n_stat_single, double t_access_single_s,
                               double t_scan_s) {
    if (t_scan_s <= 0) return 1.0;
    return 2.0 * n_stat_single / (1.0 + t_access_single_s / t_scan_s) + 1.0;
}

double acoustic_focal_length(const BeamSpec& beam, const AodSpec& aod,
                             double alpha_hz_per_s) {
    if (alpha_hz_per_s == 0.0) return std::numeric_limits<double>::infinity();
    const double a = beam.profile_constant_a;
    const double v = aod.acoustic_velocity_m_per_s;
    return a * a * v * v / (beam.wavelength_m * alpha_hz_per_s);
}

bool has_lensing(double focal_length_m) {
    return std::isfinite(focal_length_m);
}

double focal_shift(double objective_focal_m, double acoustic_focal_m) {
    if (!has_lensing(acoustic_focal_m)) return 0.0;
    return -objective_focal_m * objective_focal_m / acoustic_focal_m;
}

VipaMetrics vipa_metrics(const VipaSpec& vipa, double switch_time_factor) {
    return {vipa.fsr_hz / vipa.fwhm_linewidth_hz,
            switch_time_factor / vipa.fwhm_linewidth_hz};
}

double sideband_position(const VipaSpec& vipa, double f_sideband_hz, int n_rows) {
    if (f_sideband_hz < 0)
        throw std::invalid_argument("sideband_position: negative frequency");
    if (n_rows < 1) throw std::invalid_argument("sideband_position: n_rows must be >= 1");
    return std::fmod(f_sideband_hz, vipa.fsr_hz) / vipa.fsr_hz * n_rows;
}

double row_to_frequency(const VipaSpec& vipa, double row, int n_rows) {
    if (n_rows < 1) throw std::invalid_argument("row_to_frequency: n_rows must be >= 1");
    return row / n_rows * vipa.fsr_hz;
}

}  // namespace raster::model
