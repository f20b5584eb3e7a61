#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "raster/device.hpp"
#include "raster/oracle.hpp"

using namespace raster;
using namespace raster::oracle;

namespace {

BeamSpec paper_beam() {
    BeamSpec b;
    b.wavelength_m = 785e-9;
    b.waist_w0_m = 0.9e-3;
    b.profile_constant_a = 1.34;
    return b;
}

AodSpec paper_aod() {
    AodSpec a;
    a.acoustic_velocity_m_per_s = 4200;
    a.aperture_m = 1.8e-3;
    a.center_freq_hz = 150e6;
    a.full_bandwidth_hz = 100e6;
    a.usable_bandwidth_hz = 36e6;
    a.peak_efficiency = 0.5;
    return a;
}

// Full-bandwidth sweep at chirp rate alpha, measured at mid-scan.
double single_aod_halfwidth(double alpha) {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const double span = aod.usable_bandwidth_hz;
    const ChirpScan chirp = alpha > 0
        ? ChirpScan{aod.center_freq_hz - span / 2, aod.center_freq_hz + span / 2,
                    span / alpha}
        : ChirpScan{aod.center_freq_hz, aod.center_freq_hz, 1.0};
    const double t = alpha > 0 ? chirp.t_scan_s / 2 : 0.0;
    const auto far = far_field(build_aperture_field(beam, aod, chirp, t, +1));
    return measure_waist_1e2(far).half_width_rad;
}

}  // namespace

// Reference half-widths computed once at N=8192, pad 8, extent 8*w0 and
// frozen; the suite fails if the pipeline drifts.
TEST_CASE("frozen single-AOD half-widths across chirp rates") {
    CHECK(single_aod_halfwidth(0.0) == doctest::Approx(3.590138e-4).epsilon(5e-3));
    CHECK(single_aod_halfwidth(1e12) == doctest::Approx(3.594155e-4).epsilon(5e-3));
    CHECK(single_aod_halfwidth(3e12) == doctest::Approx(3.626616e-4).epsilon(5e-3));
    CHECK(single_aod_halfwidth(1e13) == doctest::Approx(4.140513e-4).epsilon(5e-3));
    CHECK(single_aod_halfwidth(3e13) == doctest::Approx(1.101995e-3).epsilon(5e-3));
    CHECK(single_aod_halfwidth(3.6e13) == doctest::Approx(1.215247e-3).epsilon(5e-3));
}

TEST_CASE("untruncated Gaussian matches the analytic far-field waist") {
    auto beam = paper_beam();
    GridParams grid;
    grid.extent_m = 16 * beam.waist_w0_m;  // pushes the hard edge far out
    const auto far = far_field(build_gaussian_field(beam, grid));
    const double analytic = beam.wavelength_m / (std::numbers::pi * beam.waist_w0_m);
    CHECK(measure_waist_1e2(far).half_width_rad ==
          doctest::Approx(analytic).epsilon(2e-3));
}

TEST_CASE("truncation at +/- w0 broadens the static spot ~29%") {
    const double truncated = single_aod_halfwidth(0.0);
    const double open = 785e-9 / (std::numbers::pi * 0.9e-3);
    CHECK(truncated / open == doctest::Approx(1.293).epsilon(5e-3));
}

TEST_CASE("counter-propagating pair cancels the chirp broadening exactly") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const double span = aod.usable_bandwidth_hz;
    const ChirpScan fast{aod.center_freq_hz - span / 2, aod.center_freq_hz + span / 2,
                         span / 3.6e13};
    const auto far_dyn =
        far_field(build_daod_field(beam, aod, fast, fast.t_scan_s / 2));
    const ChirpScan still{aod.center_freq_hz, aod.center_freq_hz, 1.0};
    const auto far_static = far_field(build_daod_field(beam, aod, still, 0.0));
    const double w_dyn = measure_waist_1e2(far_dyn).half_width_rad;
    const double w_static = measure_waist_1e2(far_static).half_width_rad;
    CHECK(w_dyn == doctest::Approx(w_static).epsilon(1e-3));
    CHECK(w_dyn == doctest::Approx(3.589778e-4).epsilon(5e-3));
}

TEST_CASE("Parseval: far-field power equals aperture power") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const ChirpScan chirp{132e6, 168e6, 1e-6};
    const auto field = build_aperture_field(beam, aod, chirp, 0.5e-6, +1);
    const auto far = far_field(field);
    CHECK(far.total_power == doctest::Approx(field.power()).epsilon(1e-9));
}

TEST_CASE("shift theorem: the spot sits at lambda f / v, doubled for the pair") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const ChirpScan still{150e6, 150e6, 1.0};
    const double expected = 785e-9 * 150e6 / 4200;
    const auto far1 = far_field(build_aperture_field(beam, aod, still, 0.0, +1));
    CHECK(peak_angle(far1) == doctest::Approx(expected).epsilon(1e-4));
    const auto far2 = far_field(build_daod_field(beam, aod, still, 0.0));
    CHECK(peak_angle(far2) == doctest::Approx(2 * expected).epsilon(1e-4));
    // opposite acoustic direction with a negative-span chirp still lands at
    // the instantaneous frequency
    const auto far3 = far_field(build_aperture_field(beam, aod, still, 0.0, -1));
    CHECK(peak_angle(far3) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("linearity: doubling the field quadruples peak intensity") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const ChirpScan chirp{132e6, 168e6, 1e-6};
    auto field = build_aperture_field(beam, aod, chirp, 0.5e-6, +1);
    const auto far = far_field(field);
    for (auto& z : field.samples) z *= 2.0;
    const auto far2 = far_field(field);
    CHECK(far2.peak_intensity == doctest::Approx(4.0 * far.peak_intensity).epsilon(1e-12));
    CHECK(measure_waist_1e2(far2).half_width_rad ==
          doctest::Approx(measure_waist_1e2(far).half_width_rad).epsilon(1e-12));
}

TEST_CASE("width converges under grid refinement") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const ChirpScan chirp{132e6, 168e6, 1e-6};
    GridParams coarse;  // defaults: 8192
    GridParams fine;
    fine.sample_count = 16384;
    const auto w1 = measure_waist_1e2(
        far_field(build_aperture_field(beam, aod, chirp, 0.5e-6, +1, coarse)));
    const auto w2 = measure_waist_1e2(
        far_field(build_aperture_field(beam, aod, chirp, 0.5e-6, +1, fine)));
    CHECK(w1.half_width_rad == doctest::Approx(w2.half_width_rad).epsilon(1e-2));
}

TEST_CASE("grid preconditions are enforced") {
    const auto beam = paper_beam();
    const auto aod = paper_aod();
    const ChirpScan chirp{132e6, 168e6, 1e-6};
    GridParams not_pow2;
    not_pow2.sample_count = 3000;
    CHECK_THROWS_AS(build_aperture_field(beam, aod, chirp, 0.0, +1, not_pow2),
                    std::invalid_argument);
    GridParams tiny;
    tiny.sample_count = 512;
    CHECK_THROWS_AS(build_aperture_field(beam, aod, chirp, 0.0, +1, tiny),
                    std::invalid_argument);
    GridParams narrow;
    narrow.extent_m = 4 * beam.waist_w0_m;
    CHECK_THROWS_AS(build_aperture_field(beam, aod, chirp, 0.0, +1, narrow),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_aperture_field(beam, aod, chirp, 0.0, 2),
                    std::invalid_argument);
    // 1024 samples cannot resolve the carrier fringes of a 150 MHz drive
    GridParams coarse;
    coarse.sample_count = 1024;
    GridParams wide = coarse;
    wide.extent_m = 80 * beam.waist_w0_m;
    CHECK_THROWS_AS(build_aperture_field(beam, aod, chirp, 0.5e-6, +1, wide),
                    std::runtime_error);
}

TEST_CASE("multi-lobe profiles are flagged") {
    FarField far;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        const double th = (i - n / 2) * 1e-5;
        far.angle_rad.push_back(th);
        const double a = std::exp(-2.0 * th * th / (1e-4 * 1e-4));
        const double b = std::exp(-2.0 * (th - 6e-4) * (th - 6e-4) / (1e-4 * 1e-4));
        far.intensity.push_back(a + 0.8 * b);
    }
    const double peak = *std::max_element(far.intensity.begin(), far.intensity.end());
    for (auto& v : far.intensity) v /= peak;
    const auto m = measure_waist_1e2(far);
    CHECK(m.multi_lobe);
    CHECK(m.half_width_rad > 0);
}

TEST_CASE("knife edge fall time matches the erf analytic on a wide aperture") {
    DeviceSpec device;
    device.beam = paper_beam();
    device.slow_axis.element = paper_aod();
    device.slow_axis.element.aperture_m = 7 * device.beam.waist_w0_m;
    const auto& aod = device.slow_axis.element;
    const double span = aod.usable_bandwidth_hz;
    const ChirpScan chirp{aod.center_freq_hz - span / 2, aod.center_freq_hz + span / 2,
                          1e-6};
    const auto trace = knife_edge_trace(device, chirp, 256);
    // sweeping Gaussian past a knife: levels e^-2 and 1-e^-2 sit
    // sqrt(2)*erfinv(1-2e^-2) waists apart
    const double waist = device.beam.wavelength_m /
                         (std::numbers::pi * device.beam.waist_w0_m);
    const double d_theta = 1.10151962849875 * waist;
    const double sweep_speed =
        2.0 * device.beam.wavelength_m * chirp.chirp_rate_hz_per_s() /
        aod.acoustic_velocity_m_per_s;
    CHECK(trace.fall_time_1e2_s == doctest::Approx(d_theta / sweep_speed).epsilon(0.03));
    CHECK(trace.knife_angle_rad ==
          doctest::Approx(2 * 785e-9 * 150e6 / 4200).epsilon(1e-9));
    // the spot starts below the knife and ends above it
    CHECK(trace.transmitted.front() < 0.1);
    CHECK(trace.transmitted.back() > 0.9);
    CHECK_THROWS_AS(knife_edge_trace(device, chirp, 32), std::invalid_argument);
}

TEST_CASE("resolution sweep emits one AOD and one DAOD row per alpha") {
    DeviceSpec device;
    device.beam = paper_beam();
    device.slow_axis.element = paper_aod();
    const auto rows = resolution_sweep(device, {0.0, 3.6e13});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].device == "aod");
    CHECK(rows[1].device == "daod");
    // DAOD width is chirp-rate independent
    CHECK(rows[1].width_oracle_rad ==
          doctest::Approx(rows[3].width_oracle_rad).epsilon(1e-3));
    // single-AOD width grows with the chirp
    CHECK(rows[2].width_oracle_rad > 2 * rows[0].width_oracle_rad);
    const auto csv = sweep_to_csv(rows);
    CHECK(csv.find("alpha_hz_per_s") == 0);
    CHECK(csv.find("daod") != std::string::npos);
}
