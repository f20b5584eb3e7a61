#pragma once

#include <optional>
#include <string>

namespace raster {

// Input beam at the deflector plane. waist_w0_m is the 1/e^2 intensity
// radius; the field amplitude is exp(-x^2/w0^2).
struct BeamSpec {
    double wavelength_m = 0.0;
    double waist_w0_m = 0.0;
    double profile_constant_a = 1.34;  // acoustic-lens constant, TEM00
    void validate() const;
};

struct AodSpec {
    double acoustic_velocity_m_per_s = 0.0;
    double aperture_m = 0.0;
    double center_freq_hz = 0.0;
    double full_bandwidth_hz = 0.0;
    double usable_bandwidth_hz = 0.0;
    double peak_efficiency = 1.0;
    void validate() const;
    double band_min_hz() const { return center_freq_hz - full_bandwidth_hz / 2.0; }
    double band_max_hz() const { return center_freq_hz + full_bandwidth_hz / 2.0; }
};

// Two identical AODs with counter-propagating acoustic waves. This is the
// only modeled geometry.
struct DaodSpec {
    AodSpec element;
    double pair_efficiency = 1.0;
    void validate() const;
};

struct VipaSpec {
    double fsr_hz = 0.0;
    double fwhm_linewidth_hz = 0.0;
    double reflectivity = 0.0;
    double thickness_m = 0.0;
    void validate() const;
};

struct EomSpec {
    double sideband_min_hz = 0.0;
    double sideband_max_hz = 0.0;
    double transmission = 1.0;
    void validate() const;
};

struct RelaySpec {
    double objective_focal_m = 0.0;
    void validate() const;
};

// Linear RF frequency sweep.
struct ChirpScan {
    double f_start_hz = 0.0;
    double f_end_hz = 0.0;
    double t_scan_s = 0.0;
    double span_hz() const { return f_end_hz - f_start_hz; }
    double chirp_rate_hz_per_s() const { return span_hz() / t_scan_s; }
    double freq_at(double t_s) const { return f_start_hz + chirp_rate_hz_per_s() * t_s; }
    void validate() const;
    // Additionally requires |span| <= usable bandwidth of the driven AOD.
    void validate_against(const AodSpec& aod) const;
};

// Measured reference values shipped with a device config. These come from
// bench calibration, not from the closed-form model, and the two can differ.
struct CalibrationData {
    std::optional<double> access_time_single_s;
    std::optional<double> access_time_daod_s;
    std::optional<double> dynamic_resolution_daod_1us;
    std::optional<double> switching_time_fast_s;
};

struct DeviceSpec {
    std::string name;
    BeamSpec beam;
    DaodSpec slow_axis;
    VipaSpec fast_axis;
    EomSpec eom;
    RelaySpec relay;
    double raster_period_s = 1e-6;
    CalibrationData calibration;
    void validate() const;
};

// Parses a device config (JSON with SI-unit-suffixed field names; see
// FORMATS.md). A missing beam waist defaults to aperture/2.
DeviceSpec load_device(const std::string& path);
DeviceSpec parse_device(const std::string& json_text);

}  // namespace raster
