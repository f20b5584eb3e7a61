#include "raster/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "raster/device_model.hpp"
#include "raster/kernels.hpp"

namespace raster::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex g_fftw_mutex;  // FFTW's planner is not thread-safe

// Forward DFT of `input` zero-padded to length m, numpy sign convention.
std::vector<std::complex<double>> dft_forward(
    const std::vector<std::complex<double>>& input, std::size_t m) {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_complex* in = fftw_alloc_complex(m);
    fftw_complex* out = fftw_alloc_complex(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i < input.size()) {
            in[i][0] = input[i].real();
            in[i][1] = input[i].imag();
        } else {
            in[i][0] = 0.0;
            in[i][1] = 0.0;
        }
    }
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), in, out, FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    std::vector<std::complex<double>> result(m);
    for (std::size_t i = 0; i < m; ++i) result[i] = {out[i][0], out[i][1]};
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    return result;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct ResolvedGrid {
    std::size_t n;
    double extent;
    std::size_t pad;
};

ResolvedGrid resolve_grid(const GridParams& grid, double waist_m) {
    ResolvedGrid g{grid.sample_count, grid.extent_m, grid.pad_factor};
    if (g.extent <= 0) g.extent = 8.0 * waist_m;
    if (!is_power_of_two(g.n) || g.n < 1024)
        throw std::invalid_argument("grid: sample count must be a power of two >= 1024");
    if (waist_m > 0 && g.extent < 6.0 * waist_m)
        throw std::invalid_argument("grid: extent must be >= 6x beam waist");
    if (g.pad < 1) throw std::invalid_argument("grid: pad factor must be >= 1");
    return g;
}

// >= 4 samples per fringe of the steepest local grating.
void check_fringe_sampling(double dx, double max_spatial_freq) {
    if (dx * max_spatial_freq > 0.25)
        throw std::runtime_error(
            "grid: too coarse to resolve the maximum phase gradient "
            "(need >= 4 samples per fringe)");
}

FieldProfile make_field(const BeamSpec& beam, double aperture_m, double extent_m,
                        std::size_t n, std::size_t pad, double lin_coeff,
                        double quad_coeff) {
    FieldProfile field;
    field.extent_m = extent_m;
    field.wavelength_m = beam.wavelength_m;
    field.pad_factor = pad;
    field.samples.resize(n);
    const double dx = extent_m / static_cast<double>(n);
    const double w0 = beam.waist_w0_m;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * dx;
        if (aperture_m > 0 && std::abs(x) > aperture_m / 2.0) {
            field.samples[i] = 0.0;
            continue;
        }
        const double amp = std::exp(-x * x / (w0 * w0));
        const double phase = lin_coeff * x + quad_coeff * x * x;
        field.samples[i] = std::polar(amp, phase);
    }
    return field;
}

struct Run {
    std::size_t first;
    std::size_t last;
};

std::vector<Run> runs_above(const std::vector<double>& intensity, double threshold) {
    std::vector<Run> runs;
    std::size_t i = 0;
    const std::size_t n = intensity.size();
    while (i < n) {
        if (intensity[i] > threshold) {
            std::size_t j = i;
            while (j < n && intensity[j] > threshold) ++j;
            runs.push_back({i, j - 1});
            i = j;
        } else {
            ++i;
        }
    }
    return runs;
}

double interp_angle(const FarField& far, std::size_t i0, std::size_t i1,
                    double threshold) {
    const double y0 = far.intensity[i0];
    const double y1 = far.intensity[i1];
    const double t0 = far.angle_rad[i0];
    const double t1 = far.angle_rad[i1];
    return t0 + (threshold - y0) * (t1 - t0) / (y1 - y0);
}

}  // namespace

double FieldProfile::power() const {
    const auto& ops = kernels::active();
    std::vector<double> mag(samples.size());
    ops.magnitude_squared(samples.data(), mag.data(), mag.size());
    return ops.sum(mag.data(), mag.size()) * dx_m();
}

FieldProfile build_aperture_field(const BeamSpec& beam, const AodSpec& aod,
                                  const ChirpScan& chirp, double t_s, int direction,
                                  const GridParams& grid) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("build_aperture_field: direction must be +1 or -1");
    if (beam.waist_w0_m <= 0)
        throw std::domain_error("build_aperture_field: singular beam (waist = 0)");
    chirp.validate();
    const ResolvedGrid g = resolve_grid(grid, beam.waist_w0_m);
    const double v = aod.acoustic_velocity_m_per_s;
    const double f_inst = chirp.freq_at(t_s);
    const double alpha = chirp.chirp_rate_hz_per_s();
    const double dx = g.extent / static_cast<double>(g.n);
    const double nu_max =
        std::abs(f_inst) / v + std::abs(alpha) * (g.extent / 2.0) / (v * v);
    check_fringe_sampling(dx, nu_max);
    const double lin = 2.0 * kPi * f_inst / v;
    const double quad = -direction * kPi * alpha / (v * v);
    return make_field(beam, aod.aperture_m, g.extent, g.n, g.pad, lin, quad);
}

FieldProfile build_daod_field(const BeamSpec& beam, const AodSpec& aod,
                              const ChirpScan& chirp, double t_s,
                              const GridParams& grid) {
    if (beam.waist_w0_m <= 0)
        throw std::domain_error("build_daod_field: singular beam (waist = 0)");
    chirp.validate();
    const ResolvedGrid g = resolve_grid(grid, beam.waist_w0_m);
    const double v = aod.acoustic_velocity_m_per_s;
    const double f_inst = chirp.freq_at(t_s);
    const double dx = g.extent / static_cast<double>(g.n);
    check_fringe_sampling(dx, 2.0 * std::abs(f_inst) / v);
    // phi_{+1} + phi_{-1}: the quadratic terms cancel, the deflections add.
    const double lin = 2.0 * kPi * (2.0 * f_inst) / v;
    return make_field(beam, aod.aperture_m, g.extent, g.n, g.pad, lin, 0.0);
}

FieldProfile build_gaussian_field(const BeamSpec& beam, const GridParams& grid) {
    if (beam.waist_w0_m <= 0)
        throw std::domain_error("build_gaussian_field: singular beam (waist = 0)");
    const ResolvedGrid g = resolve_grid(grid, beam.waist_w0_m);
    return make_field(beam, 0.0, g.extent, g.n, g.pad, 0.0, 0.0);
}

FarField far_field(const FieldProfile& field) {
    const std::size_t n = field.samples.size();
    if (n == 0) throw std::invalid_argument("far_field: empty field");
    const std::size_t m = n * field.pad_factor;
    const double dx = field.dx_m();
    const double dnu = 1.0 / (static_cast<double>(m) * dx);

    const auto spectrum = dft_forward(field.samples, m);
    const auto& ops = kernels::active();
    std::vector<double> raw(m);
    ops.magnitude_squared(spectrum.data(), raw.data(), m);

    FarField far;
    far.intensity.resize(m);
    far.angle_rad.resize(m);
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k < m; ++k) {
        far.intensity[k] = raw[(k + half) % m];
        far.angle_rad[k] = field.wavelength_m *
                           (static_cast<double>(k) - static_cast<double>(half)) * dnu;
    }
    // Physical scale: F = DFT * dx; power = sum |F|^2 dnu.
    const double scale = dx * dx;
    far.total_power = ops.sum(far.intensity.data(), m) * scale * dnu;
    const double peak_raw = ops.max_value(far.intensity.data(), m);
    if (peak_raw <= 0) throw std::runtime_error("far_field: zero far-field power");
    far.peak_intensity = peak_raw * scale;
    ops.scale(far.intensity.data(), m, 1.0 / peak_raw);
    return far;
}

WaistMeasurement measure_waist_1e2(const FarField& far) {
    const double threshold = std::exp(-2.0);  // intensity is max-normalized
    const auto runs = runs_above(far.intensity, threshold);
    if (runs.empty()) throw std::runtime_error("measure_waist: no lobe above threshold");
    const Run* widest = &runs[0];
    double best = far.angle_rad[runs[0].last] - far.angle_rad[runs[0].first];
    for (const auto& r : runs) {
        const double w = far.angle_rad[r.last] - far.angle_rad[r.first];
        if (w > best) {
            best = w;
            widest = &r;
        }
    }
    const std::size_t a = widest->first;
    const std::size_t b = widest->last;
    const double left =
        a > 0 ? interp_angle(far, a - 1, a, threshold) : far.angle_rad[a];
    const double right = b + 1 < far.intensity.size()
                             ? interp_angle(far, b, b + 1, threshold)
                             : far.angle_rad[b];
    return {(right - left) / 2.0, runs.size() > 1};
}

double peak_angle(const FarField& far) {
    const auto it = std::max_element(far.intensity.begin(), far.intensity.end());
    const std::size_t i = static_cast<std::size_t>(it - far.intensity.begin());
    if (i == 0 || i + 1 == far.intensity.size()) return far.angle_rad[i];
    const double y0 = far.intensity[i - 1];
    const double y1 = far.intensity[i];
    const double y2 = far.intensity[i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom == 0.0) return far.angle_rad[i];
    const double shift = 0.5 * (y0 - y2) / denom;
    return far.angle_rad[i] + shift * (far.angle_rad[i + 1] - far.angle_rad[i]);
}

KnifeEdgeTrace knife_edge_trace(const DeviceSpec& device, const ChirpScan& chirp,
                                std::size_t t_samples, Architecture arch,
                                const GridParams& grid) {
    if (t_samples < 64)
        throw std::invalid_argument("knife_edge_trace: need at least 64 time samples");
    chirp.validate_against(device.slow_axis.element);
    const BeamSpec& beam = device.beam;
    const AodSpec& aod = device.slow_axis.element;
    const double fold = arch == Architecture::daod ? 2.0 : 1.0;
    const double knife =
        fold * beam.wavelength_m * chirp.freq_at(chirp.t_scan_s / 2.0) /
        aod.acoustic_velocity_m_per_s;

    KnifeEdgeTrace trace;
    trace.knife_angle_rad = knife;
    trace.time_s.resize(t_samples);
    trace.transmitted.resize(t_samples);
    const auto& ops = kernels::active();
    for (std::size_t i = 0; i < t_samples; ++i) {
        const double t = chirp.t_scan_s * static_cast<double>(i) /
                         static_cast<double>(t_samples - 1);
        trace.time_s[i] = t;
        const FieldProfile field =
            arch == Architecture::daod
                ? build_daod_field(beam, aod, chirp, t, grid)
                : build_aperture_field(beam, aod, chirp, t, +1, grid);
        const FarField far = far_field(field);
        const auto it = std::upper_bound(far.angle_rad.begin(), far.angle_rad.end(), knife);
        const std::size_t idx = static_cast<std::size_t>(it - far.angle_rad.begin());
        const double total = ops.sum(far.intensity.data(), far.intensity.size());
        const double beyond =
            idx < far.intensity.size()
                ? ops.sum(far.intensity.data() + idx, far.intensity.size() - idx)
                : 0.0;
        trace.transmitted[i] = beyond / total;
    }

    const double lo = std::exp(-2.0);
    const double hi = 1.0 - std::exp(-2.0);
    auto first_crossing = [&](double level) -> double {
        for (std::size_t i = 0; i + 1 < t_samples; ++i) {
            const double a = trace.transmitted[i];
            const double b = trace.transmitted[i + 1];
            if ((a - level) * (b - level) <= 0.0 && a != b)
                return trace.time_s[i] +
                       (level - a) * (trace.time_s[i + 1] - trace.time_s[i]) / (b - a);
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double t_lo = first_crossing(lo);
    const double t_hi = first_crossing(hi);
    if (std::isnan(t_lo) || std::isnan(t_hi))
        throw std::runtime_error(
            "knife_edge_trace: transmitted power never crossed the 1/e^2 levels "
            "(knife outside the scanned range?)");
    trace.fall_time_1e2_s = std::abs(t_hi - t_lo);
    return trace;
}

std::vector<SweepRow> resolution_sweep(const DeviceSpec& device,
                                       const std::vector<double>& alphas_hz_per_s,
                                       const GridParams& grid) {
    const BeamSpec& beam = device.beam;
    const AodSpec& aod = device.slow_axis.element;
    const double v = aod.acoustic_velocity_m_per_s;
    const double span = aod.usable_bandwidth_hz;
    const double t_access = model::access_time(beam, aod, 1);
    const double n_stat = model::static_resolution(t_access, span, 1);
    const double sweep_angle = beam.wavelength_m * span / v;

    std::vector<SweepRow> rows;
    for (double alpha : alphas_hz_per_s) {
        const bool moving = alpha > 0;
        const double t_scan =
            moving ? span / alpha : std::numeric_limits<double>::infinity();
        const ChirpScan chirp =
            moving ? ChirpScan{aod.center_freq_hz - span / 2.0,
                               aod.center_freq_hz + span / 2.0, t_scan}
                   : ChirpScan{aod.center_freq_hz, aod.center_freq_hz, 1.0};
        const double t_mid = moving ? t_scan / 2.0 : 0.0;

        SweepRow aod_row;
        aod_row.alpha_hz_per_s = alpha;
        aod_row.t_scan_s = t_scan;
        aod_row.device = "aod";
        const FarField far_single =
            far_field(build_aperture_field(beam, aod, chirp, t_mid, +1, grid));
        aod_row.width_oracle_rad = 2.0 * measure_waist_1e2(far_single).half_width_rad;
        aod_row.width_eq_s1_rad = model::chirp_spread(beam, aod, alpha * t_access);
        aod_row.n_dyn_oracle = sweep_angle / aod_row.width_oracle_rad + 1.0;
        aod_row.n_dyn_closed_form = model::dynamic_resolution_aod(n_stat, t_access, t_scan);
        rows.push_back(aod_row);

        SweepRow daod_row;
        daod_row.alpha_hz_per_s = alpha;
        daod_row.t_scan_s = t_scan;
        daod_row.device = "daod";
        const FarField far_daod = far_field(build_daod_field(beam, aod, chirp, t_mid, grid));
        daod_row.width_oracle_rad = 2.0 * measure_waist_1e2(far_daod).half_width_rad;
        daod_row.width_eq_s1_rad = model::chirp_spread(beam, aod, 0.0);
        // Spot count over the doubled sweep range, discounted by the acoustic
        // fill overhead of a full-range sweep (T_scan out of T_scan + T_a).
        const double duty = moving ? t_scan / (t_scan + t_access) : 1.0;
        daod_row.n_dyn_oracle =
            (2.0 * sweep_angle / daod_row.width_oracle_rad) * duty + 1.0;
        daod_row.n_dyn_closed_form =
            model::dynamic_resolution_daod(n_stat, t_access, t_scan);
        rows.push_back(daod_row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "alpha_hz_per_s,t_scan_s,width_oracle_rad,width_eq_s1_rad,"
        "n_dyn_oracle,n_dyn_closed_form,device\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%s\n",
                      r.alpha_hz_per_s, r.t_scan_s, r.width_oracle_rad,
                      r.width_eq_s1_rad, r.n_dyn_oracle, r.n_dyn_closed_form,
                      r.device.c_str());
        out += buf;
    }
    return out;
}

}  // namespace raster::oracle
