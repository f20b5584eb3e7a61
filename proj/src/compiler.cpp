#include "raster/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "raster/device_model.hpp"
#include "json.hpp"

namespace raster::compiler {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// value <= limit up to relative rounding slack, so exact boundary cases pass.
bool leq_tol(double value, double limit) {
    return value <= limit + std::abs(limit) * 1e-12;
}

double default_t_fast(const ShuttleConstraints& c, const DeviceSpec& device) {
    if (c.t_fast_s > 0) return c.t_fast_s;
    return model::vipa_metrics(device.fast_axis).switch_time_s;
}

int nearest_row(const VipaSpec& vipa, double freq_hz, int n_rows) {
    return static_cast<int>(std::lround(freq_hz / vipa.fsr_hz * n_rows));
}

}  // namespace

void Pattern::validate() const {
    if (n_cols < 1 || n_rows < 1)
        throw std::invalid_argument("pattern: n_cols and n_rows must be >= 1");
    if (weights.size() != static_cast<std::size_t>(n_cols) * n_rows)
        throw std::invalid_argument("pattern: weight array size mismatch");
    for (double w : weights)
        if (!(w >= 0.0 && w <= 1.0))
            throw std::invalid_argument("pattern: weights must lie in [0, 1]");
}

Pattern Pattern::from_text(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::invalid_argument("pattern text: no rows");
    Pattern p;
    p.n_rows = static_cast<int>(lines.size());
    p.n_cols = static_cast<int>(lines[0].size());
    p.weights.assign(static_cast<std::size_t>(p.n_cols) * p.n_rows, 0.0);
    for (int r = 0; r < p.n_rows; ++r) {
        if (static_cast<int>(lines[r].size()) != p.n_cols)
            throw std::invalid_argument("pattern text: ragged rows");
        for (int c = 0; c < p.n_cols; ++c) {
            const char ch = lines[r][c];
            if (ch < '0' || ch > '9')
                throw std::invalid_argument("pattern text: rows must be digits 0-9");
            p.weight(c, r) = static_cast<double>(ch - '0') / 9.0;
        }
    }
    p.validate();
    return p;
}

Pattern Pattern::from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    Pattern p;
    p.n_cols = j.at("n_cols").get<int>();
    p.n_rows = j.at("n_rows").get<int>();
    if (p.n_cols < 1 || p.n_rows < 1)
        throw std::invalid_argument("pattern json: n_cols and n_rows must be >= 1");
    p.weights.assign(static_cast<std::size_t>(p.n_cols) * p.n_rows, 0.0);
    for (const auto& cell : j.at("cells")) {
        const int c = cell.at("c").get<int>();
        const int r = cell.at("r").get<int>();
        if (c < 0 || c >= p.n_cols || r < 0 || r >= p.n_rows)
            throw std::invalid_argument("pattern json: cell index out of range");
        p.weight(c, r) = cell.at("w").get<double>();
    }
    p.validate();
    return p;
}

Pattern Pattern::load(const std::string& path) {
    const std::string text = read_file(path);
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{' ? from_json(text) : from_text(text);
    }
    throw std::invalid_argument("pattern file is empty: " + path);
}

std::string DriveSchedule::to_json() const {
    ordered_json j;
    j["device"] = device_name;
    j["chirp"] = {{"f_start_hz", chirp.f_start_hz},
                  {"f_end_hz", chirp.f_end_hz},
                  {"t_scan_ns", chirp.t_scan_s * 1e9}};
    j["retrace_ns"] = retrace_s * 1e9;
    j["n_cols"] = n_cols;
    j["n_rows"] = n_rows;
    ordered_json events = ordered_json::array();
    for (const auto& ev : column_events) {
        ordered_json tones = ordered_json::array();
        for (const auto& tone : ev.tones)
            tones.push_back({{"frequency_hz", tone.frequency_hz},
                             {"amplitude", tone.amplitude_weight}});
        events.push_back({{"t_start_ns", ev.t_start_s * 1e9},
                          {"t_end_ns", ev.t_end_s * 1e9},
                          {"column", ev.column_index},
                          {"tones", std::move(tones)}});
    }
    j["column_events"] = std::move(events);
    return j.dump(2) + "\n";
}

DriveSchedule DriveSchedule::from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    DriveSchedule s;
    s.device_name = j.value("device", "");
    const auto& jc = j.at("chirp");
    s.chirp.f_start_hz = jc.at("f_start_hz").get<double>();
    s.chirp.f_end_hz = jc.at("f_end_hz").get<double>();
    s.chirp.t_scan_s = jc.at("t_scan_ns").get<double>() * 1e-9;
    s.retrace_s = j.at("retrace_ns").get<double>() * 1e-9;
    s.n_cols = j.at("n_cols").get<int>();
    s.n_rows = j.at("n_rows").get<int>();
    for (const auto& jev : j.at("column_events")) {
        ColumnEvent ev;
        ev.t_start_s = jev.at("t_start_ns").get<double>() * 1e-9;
        ev.t_end_s = jev.at("t_end_ns").get<double>() * 1e-9;
        ev.column_index = jev.at("column").get<int>();
        for (const auto& jt : jev.at("tones"))
            ev.tones.push_back({jt.at("frequency_hz").get<double>(),
                                jt.at("amplitude").get<double>()});
        s.column_events.push_back(std::move(ev));
    }
    if (s.n_cols < 1 || s.n_rows < 1 ||
        s.column_events.size() != static_cast<std::size_t>(s.n_cols))
        throw std::invalid_argument("schedule json: malformed column events");
    return s;
}

DriveSchedule DriveSchedule::load(const std::string& path) {
    return from_json(read_file(path));
}

DriveSchedule compile(const Pattern& pattern, const DeviceSpec& device,
                      double t_scan_s, double retrace_s) {
    pattern.validate();
    device.validate();
    if (t_scan_s <= 0) throw std::invalid_argument("compile: t_scan must be positive");

    const AodSpec& aod = device.slow_axis.element;
    const double t_access = model::access_time(device.beam, aod, 1);
    const double n_stat = model::static_resolution(t_access, aod.usable_bandwidth_hz, 1);
    const double n_dyn = model::dynamic_resolution_daod(n_stat, t_access, t_scan_s);
    if (pattern.n_cols > std::floor(n_dyn)) {
        std::ostringstream msg;
        msg << "slow axis: pattern needs " << pattern.n_cols
            << " columns but the device resolves " << std::floor(n_dyn)
            << " at t_scan = " << t_scan_s * 1e9 << " ns (excess "
            << pattern.n_cols - std::floor(n_dyn) << ")";
        throw resolution_error(msg.str());
    }
    const double n_fast = model::vipa_metrics(device.fast_axis).resolution;
    if (pattern.n_rows > std::floor(n_fast)) {
        std::ostringstream msg;
        msg << "fast axis: pattern needs " << pattern.n_rows
            << " rows but the device resolves " << std::floor(n_fast) << " (excess "
            << pattern.n_rows - std::floor(n_fast) << ")";
        throw resolution_error(msg.str());
    }

    DriveSchedule s;
    s.device_name = device.name;
    const double half_span = aod.usable_bandwidth_hz / 2.0;
    s.chirp = {aod.center_freq_hz - half_span, aod.center_freq_hz + half_span, t_scan_s};
    s.retrace_s = retrace_s < 0 ? t_access : retrace_s;
    s.n_cols = pattern.n_cols;
    s.n_rows = pattern.n_rows;
    for (int c = 0; c < pattern.n_cols; ++c) {
        ColumnEvent ev;
        ev.column_index = c;
        ev.t_start_s = t_scan_s * c / pattern.n_cols;
        ev.t_end_s = t_scan_s * (c + 1) / pattern.n_cols;
        for (int r = 0; r < pattern.n_rows; ++r) {
            const double w = pattern.weight(c, r);
            if (w > 0)
                ev.tones.push_back({model::row_to_frequency(device.fast_axis, r,
                                                            pattern.n_rows),
                                    std::sqrt(w)});
        }
        s.column_events.push_back(std::move(ev));
    }
    return s;
}

Pattern decode(const DriveSchedule& schedule, const DeviceSpec& device) {
    Pattern p;
    p.n_cols = schedule.n_cols;
    p.n_rows = schedule.n_rows;
    p.weights.assign(static_cast<std::size_t>(p.n_cols) * p.n_rows, 0.0);
    for (const auto& ev : schedule.column_events) {
        if (ev.column_index < 0 || ev.column_index >= p.n_cols)
            throw std::invalid_argument("decode: column index out of range");
        for (const auto& tone : ev.tones) {
            const int r = nearest_row(device.fast_axis, tone.frequency_hz, p.n_rows);
            if (r < 0 || r >= p.n_rows)
                throw std::invalid_argument("decode: tone maps outside the row grid");
            p.weight(ev.column_index, r) =
                tone.amplitude_weight * tone.amplitude_weight;
        }
    }
    p.validate();
    return p;
}

bool ConstraintReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ConstraintCheck& c) { return c.pass; });
}

const ConstraintCheck& ConstraintReport::at(const std::string& id) const {
    for (const auto& c : checks)
        if (c.id == id) return c;
    throw std::out_of_range("no constraint " + id);
}

std::string ConstraintReport::to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << c.id << " [" << (c.pass ? "PASS" : "FAIL") << "] " << c.description
            << ": required " << c.required << ", actual " << c.actual << ", margin "
            << c.margin;
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << "\n";
    }
    return out.str();
}

ConstraintReport validate(const DriveSchedule& schedule, const DeviceSpec& device,
                          const ShuttleConstraints& constraints) {
    ConstraintReport report;
    const AodSpec& aod = device.slow_axis.element;
    const double t_scan = schedule.chirp.t_scan_s;
    const double t_access = model::access_time(device.beam, aod, 1);
    const double t_fast = default_t_fast(constraints, device);
    const double dwell = t_scan / schedule.n_cols;

    {
        ConstraintCheck c;
        c.id = "C1";
        c.description = "raster rate clears the parametric-heating margin";
        c.required = constraints.heating_margin * 2.0 * constraints.f_trap_hz;
        c.actual = 1.0 / (t_scan + schedule.retrace_s);
        c.margin = c.actual - c.required;
        c.pass = leq_tol(c.required, c.actual);
        report.checks.push_back(c);
    }
    {
        ConstraintCheck c;
        c.id = "C2";
        c.description = "fast-axis switching fits the per-column slot of one access time";
        c.required = t_access / schedule.n_cols;
        c.actual = t_fast;
        c.margin = c.required - c.actual;
        c.pass = leq_tol(c.actual, c.required);
        report.checks.push_back(c);
    }
    {
        const double n_stat =
            model::static_resolution(t_access, aod.usable_bandwidth_hz, 1);
        ConstraintCheck c;
        c.id = "C3";
        c.description = "column count within the slow-axis dynamic resolution";
        c.required = model::dynamic_resolution_daod(n_stat, t_access, t_scan);
        c.actual = schedule.n_cols;
        c.margin = c.required - c.actual;
        c.pass = leq_tol(c.actual, c.required);
        report.checks.push_back(c);
    }
    {
        ConstraintCheck c;
        c.id = "C4";
        c.description = "row count within the fast-axis resolution";
        c.required = model::vipa_metrics(device.fast_axis).resolution;
        c.actual = schedule.n_rows;
        c.margin = c.required - c.actual;
        c.pass = leq_tol(c.actual, c.required);
        report.checks.push_back(c);
    }
    {
        ConstraintCheck c;
        c.id = "C5";
        c.description = "all fast-axis tones inside the EOM sideband range";
        c.required = device.eom.sideband_max_hz;
        c.pass = true;
        bool any = false;
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& ev : schedule.column_events) {
            for (const auto& tone : ev.tones) {
                const double f = tone.frequency_hz;
                if (!any) c.actual = f;
                any = true;
                const double dist = std::min(f - device.eom.sideband_min_hz,
                                             device.eom.sideband_max_hz - f);
                if (dist < worst) {
                    worst = dist;
                    c.actual = f;
                    if (dist < 0) {
                        std::ostringstream d;
                        d << "column " << ev.column_index << ", row "
                          << nearest_row(device.fast_axis, f, schedule.n_rows)
                          << " at " << f * 1e-9 << " GHz is out of band";
                        c.detail = d.str();
                    }
                }
            }
        }
        if (!any) {
            c.detail = "no tones";
            worst = 0.0;
        }
        c.margin = worst;
        c.pass = worst >= 0.0;
        report.checks.push_back(c);
    }
    {
        ConstraintCheck c;
        c.id = "C6";
        c.description = "per-column dwell covers one fast-axis switch";
        c.required = t_fast;
        c.actual = dwell;
        c.margin = c.actual - c.required;
        c.pass = leq_tol(c.required, c.actual);
        report.checks.push_back(c);
    }
    return report;
}

TimingReport timing_report(const DriveSchedule& schedule) {
    TimingReport t;
    const double period = schedule.chirp.t_scan_s + schedule.retrace_s;
    t.refresh_rate_hz = 1.0 / period;
    t.duty = schedule.chirp.t_scan_s / period;
    t.column_dwell_s = schedule.chirp.t_scan_s / schedule.n_cols;
    return t;
}

}  // namespace raster::compiler
