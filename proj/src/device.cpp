#include "raster/device.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace raster {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double get_num(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("device config: missing field '" + key + "'");
    if (!j.at(key).is_number())
        throw std::invalid_argument("device config: field '" + key + "' is not a number");
    return j.at(key).get<double>();
}

double get_num_or(const nlohmann::json& j, const std::string& key, double fallback) {
    return j.contains(key) ? get_num(j, key) : fallback;
}

}  // namespace

void BeamSpec::validate() const {
    require(std::isfinite(wavelength_m) && wavelength_m > 0, "beam: wavelength must be > 0");
    require(std::isfinite(waist_w0_m) && waist_w0_m >= 0, "beam: waist must be >= 0");
    require(std::isfinite(profile_constant_a) && profile_constant_a > 0,
            "beam: profile constant must be > 0");
}

void AodSpec::validate() const {
    require(acoustic_velocity_m_per_s > 0, "aod: acoustic velocity must be > 0");
    require(aperture_m > 0, "aod: aperture must be > 0");
    require(usable_bandwidth_hz > 0 && usable_bandwidth_hz <= full_bandwidth_hz,
            "aod: usable bandwidth must be in (0, full bandwidth]");
    require(peak_efficiency >= 0 && peak_efficiency <= 1,
            "aod: peak efficiency must be in [0, 1]");
}

void DaodSpec::validate() const {
    element.validate();
    require(pair_efficiency >= 0 && pair_efficiency <= 1,
            "daod: pair efficiency must be in [0, 1]");
}

void VipaSpec::validate() const {
    require(fwhm_linewidth_hz > 0 && fwhm_linewidth_hz < fsr_hz,
            "vipa: FWHM must be in (0, FSR)");
    require(reflectivity > 0 && reflectivity < 1, "vipa: reflectivity must be in (0, 1)");
    require(thickness_m > 0, "vipa: thickness must be > 0");
}

void EomSpec::validate() const {
    require(sideband_min_hz > 0 && sideband_min_hz < sideband_max_hz,
            "eom: sideband range must satisfy 0 < min < max");
    require(transmission >= 0 && transmission <= 1, "eom: transmission must be in [0, 1]");
}

void RelaySpec::validate() const {
    require(objective_focal_m > 0, "relay: objective focal length must be > 0");
}

void ChirpScan::validate() const {
    require(std::isfinite(f_start_hz) && std::isfinite(f_end_hz), "chirp: non-finite frequency");
    require(t_scan_s > 0, "chirp: scan time must be > 0");
}

void ChirpScan::validate_against(const AodSpec& aod) const {
    validate();
    require(std::abs(span_hz()) <= aod.usable_bandwidth_hz * (1 + 1e-12),
            "chirp: span exceeds the usable bandwidth of the driven AOD");
}

void DeviceSpec::validate() const {
    beam.validate();
    slow_axis.validate();
    fast_axis.validate();
    eom.validate();
    relay.validate();
    require(raster_period_s > 0, "device: raster period must be > 0");
    require(slow_axis.element.aperture_m >= 2 * beam.waist_w0_m,
            "device: AOD aperture must be >= 2x beam waist");
}

DeviceSpec parse_device(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("device config: ") + e.what());
    }

    DeviceSpec d;
    d.name = j.value("name", "");

    const auto& beam = j.at("beam");
    d.beam.wavelength_m = get_num(beam, "wavelength_m");
    d.beam.profile_constant_a = get_num_or(beam, "profile_constant_a", 1.34);

    const auto& slow = j.at("slow_axis");
    const auto& el = slow.at("element");
    d.slow_axis.element.acoustic_velocity_m_per_s = get_num(el, "acoustic_velocity_m_per_s");
    d.slow_axis.element.aperture_m = get_num(el, "aperture_m");
    d.slow_axis.element.center_freq_hz = get_num(el, "center_freq_hz");
    d.slow_axis.element.full_bandwidth_hz = get_num(el, "full_bandwidth_hz");
    d.slow_axis.element.usable_bandwidth_hz =
        get_num_or(el, "usable_bandwidth_hz", d.slow_axis.element.full_bandwidth_hz);
    d.slow_axis.element.peak_efficiency = get_num_or(el, "peak_efficiency", 1.0);
    d.slow_axis.pair_efficiency = get_num_or(slow, "pair_efficiency", 1.0);

    // Waist defaults to aperture/2 but is never silently overridden.
    d.beam.waist_w0_m =
        get_num_or(beam, "waist_w0_m", d.slow_axis.element.aperture_m / 2.0);

    const auto& vipa = j.at("fast_axis");
    d.fast_axis.fsr_hz = get_num(vipa, "fsr_hz");
    d.fast_axis.fwhm_linewidth_hz = get_num(vipa, "fwhm_linewidth_hz");
    d.fast_axis.reflectivity = get_num(vipa, "reflectivity");
    d.fast_axis.thickness_m = get_num(vipa, "thickness_m");

    const auto& eom = j.at("eom");
    d.eom.sideband_min_hz = get_num(eom, "sideband_min_hz");
    d.eom.sideband_max_hz = get_num(eom, "sideband_max_hz");
    d.eom.transmission = get_num_or(eom, "transmission", 1.0);

    d.relay.objective_focal_m = get_num(j.at("relay"), "objective_focal_m");
    d.raster_period_s = get_num_or(j, "raster_period_s", 1e-6);

    if (j.contains("calibration")) {
        const auto& cal = j.at("calibration");
        if (cal.contains("access_time_single_s"))
            d.calibration.access_time_single_s = get_num(cal, "access_time_single_s");
        if (cal.contains("access_time_daod_s"))
            d.calibration.access_time_daod_s = get_num(cal, "access_time_daod_s");
        if (cal.contains("dynamic_resolution_daod_1us"))
            d.calibration.dynamic_resolution_daod_1us =
                get_num(cal, "dynamic_resolution_daod_1us");
        if (cal.contains("switching_time_fast_s"))
            d.calibration.switching_time_fast_s = get_num(cal, "switching_time_fast_s");
    }

    d.validate();
    return d;
}

DeviceSpec load_device(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("device config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_device(ss.str());
}

}  // namespace raster
