#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "raster/compiler.hpp"

// Parallel atom-transport planning under the device timing model, with
// sequential-deflector baselines for comparison.
namespace raster::planner {

using Position = std::array<double, 2>;  // {x_um, y_um}

struct Bounds {
    double x_min_um = 0.0, y_min_um = 0.0;
    double x_max_um = 0.0, y_max_um = 0.0;
    bool contains(const Position& p) const;
};

struct AtomConfig {
    std::vector<Position> positions_um;
    Bounds bounds_um;
    void validate() const;  // all positions within bounds
    static AtomConfig load(const std::string& path);
    static AtomConfig from_json(const std::string& json_text);
};

enum class DeflectorModel { crossed_aod, aod_vipa, daod_vipa };

DeflectorModel parse_model(const std::string& name);
std::string model_name(DeflectorModel model);

struct DeviceCapability {
    DeflectorModel model = DeflectorModel::daod_vipa;
    double t_access_s = 0.0;
    double t_fast_s = 0.0;
    double raster_rate_hz = 0.0;
};

// Capability derived from a device config: single-AOD access time, VIPA
// switching time, raster rate 1/raster_period.
DeviceCapability capability_from_device(const DeviceSpec& device, DeflectorModel model);

// Time to address N targets once. Sequential deflectors pay T_a per target;
// the rastering device addresses every column in one access time.
double addressing_time(std::size_t n_atoms, const DeviceCapability& cap);

// Top transport speed, step * R_raster.
double max_speed_m_per_s(double raster_rate_hz, double step_m);

struct MoveSchedule {
    std::size_t cycles = 0;
    // cycles x N; present only when requested (benchmarks skip it).
    std::vector<std::vector<Position>> per_cycle_positions_um;
    double total_time_s = 0.0;
    double addressing_overhead_per_cycle_s = 0.0;
    double max_step_um = 0.0;  // largest single-cycle displacement of any atom
};

// Plans atom i -> target i (identity assignment).
//   daod_vipa:   all atoms advance simultaneously along straight lines,
//                cycles = ceil(max distance / step).
//   aod_vipa:    straight lines, but atoms move one at a time.
//   crossed_aod: motion restricted to row/column translations; x-legs grouped
//                by shared initial row, y-legs by shared final column, groups
//                executed sequentially.
// Throws on mismatched counts or targets outside bounds.
MoveSchedule plan_moves(const AtomConfig& initial, const AtomConfig& target,
                        const DeviceCapability& cap,
                        const compiler::ShuttleConstraints& constraints,
                        bool keep_positions = true);

struct BenchRow {
    int n_atoms = 0;
    int trials = 0;
    double mean_ratio = 0.0;  // time(crossed_aod) / time(daod_vipa)
    double stddev_ratio = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double fit_slope = 0.0;  // least-squares slope of mean_ratio vs N through origin
};

BenchResult speedup_bench(const std::vector<int>& atom_counts, int trials,
                          std::uint64_t seed, const DeviceCapability& daod_cap,
                          const compiler::ShuttleConstraints& constraints);

std::string bench_to_csv(const BenchResult& result);

}  // namespace raster::planner
