#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "raster/device.hpp"

// Lowers a 2D intensity pattern into a timed drive schedule: one linear
// slow-axis chirp per sweep plus per-column fast-axis tone lists.
namespace raster::compiler {

class resolution_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Column-major weight grid; weight(c, r) in [0, 1] is the requested
// intensity fraction of cell (column c, row r).
struct Pattern {
    int n_cols = 0;
    int n_rows = 0;
    std::vector<double> weights;  // size n_cols * n_rows, index c * n_rows + r

    double weight(int c, int r) const { return weights[static_cast<std::size_t>(c) * n_rows + r]; }
    double& weight(int c, int r) { return weights[static_cast<std::size_t>(c) * n_rows + r]; }
    void validate() const;
    bool operator==(const Pattern&) const = default;

    // Rows of '0'..'9' digits, scaled to weight/9. Line r is row r.
    static Pattern from_text(const std::string& text);
    static Pattern from_json(const std::string& json_text);
    static Pattern load(const std::string& path);  // .txt or .json by content
};

struct Tone {
    double frequency_hz = 0.0;
    double amplitude_weight = 0.0;  // intensity = amplitude^2
    bool operator==(const Tone&) const = default;
};

struct ColumnEvent {
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    int column_index = 0;
    std::vector<Tone> tones;  // empty for dark columns
};

struct DriveSchedule {
    std::string device_name;
    ChirpScan chirp;
    double retrace_s = 0.0;
    int n_cols = 0;
    int n_rows = 0;
    std::vector<ColumnEvent> column_events;

    // Stable-key JSON with times in ns and frequencies in Hz; byte-identical
    // for identical schedules.
    std::string to_json() const;
    static DriveSchedule from_json(const std::string& json_text);
    static DriveSchedule load(const std::string& path);
};

struct ShuttleConstraints {
    double f_trap_hz = 50e3;
    double heating_margin = 10.0;
    double step_max_m = 100e-9;
    double t_fast_s = 0.0;  // 0 -> derive from the device's VIPA linewidth
};

struct ConstraintCheck {
    std::string id;
    std::string description;
    double required = 0.0;
    double actual = 0.0;
    double margin = 0.0;  // positive iff satisfied, in the constraint's own unit
    bool pass = false;
    std::string detail;  // e.g. which row violates a band limit
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;
    bool all_pass() const;
    const ConstraintCheck& at(const std::string& id) const;
    std::string to_text() const;
};

// Negative retrace_s selects the default: one single-AOD access time, so the
// acoustic fill is fresh before the next sweep. The chirp spans the usable
// bandwidth centered on F0; column j is driven at the half-integer center
// f_start + (j + 1/2) * span / n_cols during window [j, j+1) * t_scan/n_cols.
// Throws resolution_error if the pattern exceeds either axis resolution.
DriveSchedule compile(const Pattern& pattern, const DeviceSpec& device,
                      double t_scan_s, double retrace_s = -1.0);

// Inverse lowering: column -> index, tone -> row, amplitude^2 -> weight.
Pattern decode(const DriveSchedule& schedule, const DeviceSpec& device);

// Evaluates every registered constraint (C1..C6); failures are report
// entries, never exceptions.
ConstraintReport validate(const DriveSchedule& schedule, const DeviceSpec& device,
                          const ShuttleConstraints& constraints);

struct TimingReport {
    double refresh_rate_hz = 0.0;
    double duty = 0.0;
    double column_dwell_s = 0.0;
};

TimingReport timing_report(const DriveSchedule& schedule);

}  // namespace raster::compiler
