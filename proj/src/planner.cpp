#include "raster/planner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "raster/device_model.hpp"
#include "json.hpp"

namespace raster::planner {

namespace {

// ceil with a hair of slack so an exact multiple (10 um / 100 nm) does not
// round up to an extra cycle.
std::size_t cycles_for(double distance_um, double step_um) {
    if (distance_um <= 0) return 0;
    return static_cast<std::size_t>(std::ceil(distance_um / step_um * (1.0 - 1e-12)));
}

double step_max_um(const compiler::ShuttleConstraints& c) { return c.step_max_m * 1e6; }

struct Leg {
    int axis;                 // 0 = x, 1 = y
    std::vector<int> atoms;   // members moving together
    std::size_t steps = 0;
};

long long quantize_nm(double um) { return std::llround(um * 1e3); }

}  // namespace

bool Bounds::contains(const Position& p) const {
    return p[0] >= x_min_um && p[0] <= x_max_um && p[1] >= y_min_um &&
           p[1] <= y_max_um;
}

void AtomConfig::validate() const {
    if (bounds_um.x_max_um < bounds_um.x_min_um ||
        bounds_um.y_max_um < bounds_um.y_min_um)
        throw std::invalid_argument("atom config: inverted bounds");
    for (const auto& p : positions_um)
        if (!bounds_um.contains(p))
            throw std::invalid_argument("atom config: position outside bounds");
}

AtomConfig AtomConfig::from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    AtomConfig cfg;
    const auto& jb = j.at("bounds_um");
    cfg.bounds_um.x_min_um = jb.at("x_min").get<double>();
    cfg.bounds_um.y_min_um = jb.at("y_min").get<double>();
    cfg.bounds_um.x_max_um = jb.at("x_max").get<double>();
    cfg.bounds_um.y_max_um = jb.at("y_max").get<double>();
    for (const auto& jp : j.at("positions_um")) {
        if (jp.size() != 2)
            throw std::invalid_argument("atom config: positions must be [x, y] pairs");
        cfg.positions_um.push_back({jp[0].get<double>(), jp[1].get<double>()});
    }
    cfg.validate();
    return cfg;
}

AtomConfig AtomConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

DeflectorModel parse_model(const std::string& name) {
    if (name == "crossed_aod") return DeflectorModel::crossed_aod;
    if (name == "aod_vipa") return DeflectorModel::aod_vipa;
    if (name == "daod_vipa") return DeflectorModel::daod_vipa;
    throw std::invalid_argument("unknown deflector model: " + name);
}

std::string model_name(DeflectorModel model) {
    switch (model) {
        case DeflectorModel::crossed_aod: return "crossed_aod";
        case DeflectorModel::aod_vipa: return "aod_vipa";
        case DeflectorModel::daod_vipa: return "daod_vipa";
    }
    throw std::invalid_argument("unknown deflector model");
}

DeviceCapability capability_from_device(const DeviceSpec& device,
                                        DeflectorModel model) {
    DeviceCapability cap;
    cap.model = model;
    cap.t_access_s = model::access_time(device.beam, device.slow_axis.element, 1);
    cap.t_fast_s = model::vipa_metrics(device.fast_axis).switch_time_s;
    cap.raster_rate_hz = 1.0 / device.raster_period_s;
    return cap;
}

double addressing_time(std::size_t n_atoms, const DeviceCapability& cap) {
    if (cap.model == DeflectorModel::daod_vipa) return cap.t_access_s;
    return static_cast<double>(n_atoms) * cap.t_access_s;
}

double max_speed_m_per_s(double raster_rate_hz, double step_m) {
    return step_m * raster_rate_hz;
}

MoveSchedule plan_moves(const AtomConfig& initial, const AtomConfig& target,
                        const DeviceCapability& cap,
                        const compiler::ShuttleConstraints& constraints,
                        bool keep_positions) {
    initial.validate();
    target.validate();
    const std::size_t n = initial.positions_um.size();
    if (target.positions_um.size() != n)
        throw std::invalid_argument("plan_moves: atom counts differ");
    const double step = step_max_um(constraints);
    if (step <= 0) throw std::invalid_argument("plan_moves: step_max must be positive");

    MoveSchedule sched;
    sched.addressing_overhead_per_cycle_s = addressing_time(n, cap);
    std::vector<Position> pos = initial.positions_um;

    // One leg = a straight segment for a set of atoms, executed together over
    // `steps` cycles while every other atom holds still.
    std::vector<Leg> legs;
    if (cap.model == DeflectorModel::daod_vipa) {
        Leg all{0, {}, 0};
        double d_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            all.atoms.push_back(static_cast<int>(i));
            const double dx = target.positions_um[i][0] - pos[i][0];
            const double dy = target.positions_um[i][1] - pos[i][1];
            d_max = std::max(d_max, std::hypot(dx, dy));
        }
        all.axis = -1;  // full 2D segment
        all.steps = cycles_for(d_max, step);
        if (all.steps > 0) legs.push_back(std::move(all));
    } else if (cap.model == DeflectorModel::aod_vipa) {
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = target.positions_um[i][0] - pos[i][0];
            const double dy = target.positions_um[i][1] - pos[i][1];
            const std::size_t steps = cycles_for(std::hypot(dx, dy), step);
            if (steps > 0) legs.push_back({-1, {static_cast<int>(i)}, steps});
        }
    } else {
        // crossed AOD: rigid row/column translations only. x-legs share the
        // atoms' initial row; y-legs share the final column.
        std::map<long long, std::vector<int>> by_row, by_col;
        for (std::size_t i = 0; i < n; ++i) {
            if (target.positions_um[i][0] != pos[i][0])
                by_row[quantize_nm(pos[i][1])].push_back(static_cast<int>(i));
            if (target.positions_um[i][1] != pos[i][1])
                by_col[quantize_nm(target.positions_um[i][0])].push_back(
                    static_cast<int>(i));
        }
        for (const auto& [row, atoms] : by_row) {
            double d_max = 0.0;
            for (int i : atoms)
                d_max = std::max(d_max,
                                 std::abs(target.positions_um[i][0] - pos[i][0]));
            const std::size_t steps = cycles_for(d_max, step);
            if (steps > 0) legs.push_back({0, atoms, steps});
        }
        for (const auto& [col, atoms] : by_col) {
            double d_max = 0.0;
            for (int i : atoms)
                d_max = std::max(d_max,
                                 std::abs(target.positions_um[i][1] - pos[i][1]));
            const std::size_t steps = cycles_for(d_max, step);
            if (steps > 0) legs.push_back({1, atoms, steps});
        }
    }

    for (const Leg& leg : legs) {
        std::vector<Position> start(leg.atoms.size());
        std::vector<Position> delta(leg.atoms.size());
        for (std::size_t k = 0; k < leg.atoms.size(); ++k) {
            const int i = leg.atoms[k];
            start[k] = pos[i];
            delta[k][0] = leg.axis == 1 ? 0.0 : target.positions_um[i][0] - pos[i][0];
            delta[k][1] = leg.axis == 0 ? 0.0 : target.positions_um[i][1] - pos[i][1];
        }
        for (std::size_t s = 1; s <= leg.steps; ++s) {
            const double frac = static_cast<double>(s) / leg.steps;
            for (std::size_t k = 0; k < leg.atoms.size(); ++k) {
                const int i = leg.atoms[k];
                const Position prev = pos[i];
                pos[i][0] = start[k][0] + delta[k][0] * frac;
                pos[i][1] = start[k][1] + delta[k][1] * frac;
                if (s == leg.steps) {
                    // land exactly on the leg's endpoint
                    if (leg.axis != 1) pos[i][0] = start[k][0] + delta[k][0];
                    if (leg.axis != 0) pos[i][1] = start[k][1] + delta[k][1];
                }
                sched.max_step_um =
                    std::max(sched.max_step_um, std::hypot(pos[i][0] - prev[0],
                                                           pos[i][1] - prev[1]));
            }
            if (keep_positions) sched.per_cycle_positions_um.push_back(pos);
        }
        sched.cycles += leg.steps;
    }

    sched.total_time_s = static_cast<double>(sched.cycles) / cap.raster_rate_hz;
    return sched;
}

BenchResult speedup_bench(const std::vector<int>& atom_counts, int trials,
                          std::uint64_t seed, const DeviceCapability& daod_cap,
                          const compiler::ShuttleConstraints& constraints) {
    if (trials < 1) throw std::invalid_argument("speedup_bench: trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 50.0);
    DeviceCapability crossed_cap = daod_cap;
    crossed_cap.model = DeflectorModel::crossed_aod;
    DeviceCapability daod = daod_cap;
    daod.model = DeflectorModel::daod_vipa;

    BenchResult result;
    for (int n : atom_counts) {
        double sum = 0.0, sum_sq = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            AtomConfig a, b;
            a.bounds_um = b.bounds_um = {0.0, 0.0, 50.0, 50.0};
            for (int i = 0; i < n; ++i) {
                a.positions_um.push_back({coord(rng), coord(rng)});
                b.positions_um.push_back({coord(rng), coord(rng)});
            }
            const auto slow = plan_moves(a, b, crossed_cap, constraints, false);
            const auto fast = plan_moves(a, b, daod, constraints, false);
            const double ratio = slow.total_time_s / fast.total_time_s;
            sum += ratio;
            sum_sq += ratio * ratio;
        }
        BenchRow row;
        row.n_atoms = n;
        row.trials = trials;
        row.mean_ratio = sum / trials;
        const double var = std::max(0.0, sum_sq / trials - row.mean_ratio * row.mean_ratio);
        row.stddev_ratio = std::sqrt(var);
        result.rows.push_back(row);
    }
    double num = 0.0, den = 0.0;
    for (const auto& row : result.rows) {
        num += row.n_atoms * row.mean_ratio;
        den += static_cast<double>(row.n_atoms) * row.n_atoms;
    }
    result.fit_slope = den > 0 ? num / den : 0.0;
    return result;
}

std::string bench_to_csv(const BenchResult& result) {
    std::string out = "n_atoms,trials,mean_ratio,stddev_ratio\n";
    char buf[128];
    for (const auto& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", row.n_atoms, row.trials,
                      row.mean_ratio, row.stddev_ratio);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "# fit_slope %.6f\n", result.fit_slope);
    out += buf;
    return out;
}

}  // namespace raster::planner
