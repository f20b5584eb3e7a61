#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "raster/planner.hpp"

using namespace raster::planner;
using raster::compiler::ShuttleConstraints;

namespace {

DeviceCapability paper_cap(DeflectorModel model) {
    DeviceCapability cap;
    cap.model = model;
    cap.t_access_s = 457e-9;
    cap.t_fast_s = 1e-9;
    cap.raster_rate_hz = 1e6;
    return cap;
}

AtomConfig box(std::vector<Position> positions) {
    AtomConfig cfg;
    cfg.bounds_um = {0.0, 0.0, 50.0, 50.0};
    cfg.positions_um = std::move(positions);
    return cfg;
}

AtomConfig random_box(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 50.0);
    AtomConfig cfg;
    cfg.bounds_um = {0.0, 0.0, 50.0, 50.0};
    for (int i = 0; i < n; ++i) cfg.positions_um.push_back({u(rng), u(rng)});
    return cfg;
}

}  // namespace

TEST_CASE("model names round-trip") {
    for (auto m : {DeflectorModel::crossed_aod, DeflectorModel::aod_vipa,
                   DeflectorModel::daod_vipa})
        CHECK(parse_model(model_name(m)) == m);
    CHECK_THROWS_AS(parse_model("galvo"), std::invalid_argument);
}

TEST_CASE("addressing time: sequential N*T_a vs one access time") {
    CHECK(addressing_time(100, paper_cap(DeflectorModel::crossed_aod)) ==
          doctest::Approx(45.7e-6).epsilon(1e-9));
    CHECK(addressing_time(0, paper_cap(DeflectorModel::crossed_aod)) == 0.0);
    CHECK(addressing_time(100, paper_cap(DeflectorModel::daod_vipa)) ==
          doctest::Approx(457e-9).epsilon(1e-9));
    CHECK(addressing_time(100, paper_cap(DeflectorModel::crossed_aod)) /
              addressing_time(100, paper_cap(DeflectorModel::daod_vipa)) ==
          doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("max speed: step times raster rate") {
    CHECK(max_speed_m_per_s(1e6, 100e-9) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(max_speed_m_per_s(2e6, 100e-9) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(max_speed_m_per_s(0.0, 100e-9) == 0.0);
}

TEST_CASE("single atom, 10 um move: 100 cycles, 100 us") {
    const auto sched = plan_moves(box({{10, 25}}), box({{20, 25}}),
                                  paper_cap(DeflectorModel::daod_vipa),
                                  ShuttleConstraints{});
    CHECK(sched.cycles == 100);
    CHECK(sched.total_time_s == doctest::Approx(100e-6).epsilon(1e-12));
    CHECK(sched.max_step_um <= 0.1 + 1e-9);
    REQUIRE(sched.per_cycle_positions_um.size() == 100);
    const auto& last = sched.per_cycle_positions_um.back()[0];
    CHECK(std::abs(last[0] - 20.0) < 1e-3);  // 1 nm
    CHECK(std::abs(last[1] - 25.0) < 1e-3);
}

TEST_CASE("no-op plan: zero cycles, zero time") {
    const auto cfg = box({{5, 5}, {7, 9}});
    const auto sched = plan_moves(cfg, cfg, paper_cap(DeflectorModel::daod_vipa),
                                  ShuttleConstraints{});
    CHECK(sched.cycles == 0);
    CHECK(sched.total_time_s == 0.0);
    CHECK(sched.per_cycle_positions_um.empty());
}

TEST_CASE("step bound and endpoint exactness hold for every model") {
    std::mt19937_64 rng(99);
    for (auto model : {DeflectorModel::crossed_aod, DeflectorModel::aod_vipa,
                       DeflectorModel::daod_vipa}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = random_box(rng, 6);
            const auto b = random_box(rng, 6);
            const auto sched =
                plan_moves(a, b, paper_cap(model), ShuttleConstraints{});
            CHECK(sched.max_step_um <= 0.1 + 1e-9);
            REQUIRE(!sched.per_cycle_positions_um.empty());
            const auto& last = sched.per_cycle_positions_um.back();
            for (std::size_t i = 0; i < last.size(); ++i) {
                CHECK(std::abs(last[i][0] - b.positions_um[i][0]) < 1e-3);
                CHECK(std::abs(last[i][1] - b.positions_um[i][1]) < 1e-3);
            }
            // replay: no single-cycle displacement exceeds the step bound
            auto prev = a.positions_um;
            for (const auto& frame : sched.per_cycle_positions_um) {
                for (std::size_t i = 0; i < frame.size(); ++i)
                    CHECK(std::hypot(frame[i][0] - prev[i][0],
                                     frame[i][1] - prev[i][1]) <= 0.1 + 1e-9);
                prev = frame;
            }
        }
    }
}

TEST_CASE("simultaneity: per-cycle overhead is flat in N for the raster device") {
    std::mt19937_64 rng(17);
    double first = -1.0;
    for (int n : {1, 10, 100}) {
        const auto sched =
            plan_moves(random_box(rng, n), random_box(rng, n),
                       paper_cap(DeflectorModel::daod_vipa), ShuttleConstraints{}, false);
        if (first < 0) first = sched.addressing_overhead_per_cycle_s;
        CHECK(sched.addressing_overhead_per_cycle_s == first);
    }
    // the sequential baseline grows instead
    const auto seq = plan_moves(random_box(rng, 100), random_box(rng, 100),
                                paper_cap(DeflectorModel::crossed_aod),
                                ShuttleConstraints{}, false);
    CHECK(seq.addressing_overhead_per_cycle_s == doctest::Approx(100 * 457e-9));
}

TEST_CASE("input validation") {
    const auto cap = paper_cap(DeflectorModel::daod_vipa);
    CHECK_THROWS_AS(plan_moves(box({{1, 1}}), box({{1, 1}, {2, 2}}), cap,
                               ShuttleConstraints{}),
                    std::invalid_argument);
    AtomConfig out = box({{1, 1}});
    out.positions_um[0] = {60.0, 1.0};
    CHECK_THROWS_AS(plan_moves(box({{1, 1}}), out, cap, ShuttleConstraints{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AtomConfig::from_json(
                        R"({"bounds_um": {"x_min": 0, "y_min": 0, "x_max": 1, "y_max": 1},
                            "positions_um": [[5, 0]]})"),
                    std::invalid_argument);
}

TEST_CASE("speedup grows ~linearly in N and the bench is reproducible") {
    const auto cap = paper_cap(DeflectorModel::daod_vipa);
    const auto r1 = speedup_bench({4, 8, 16, 32}, 50, 7, cap, ShuttleConstraints{});
    REQUIRE(r1.rows.size() == 4);
    CHECK(r1.fit_slope > 0.5);
    CHECK(r1.fit_slope < 1.5);
    for (std::size_t i = 1; i < r1.rows.size(); ++i)
        CHECK(r1.rows[i].mean_ratio > r1.rows[i - 1].mean_ratio);

    const auto r2 = speedup_bench({4, 8, 16, 32}, 50, 7, cap, ShuttleConstraints{});
    CHECK(bench_to_csv(r1) == bench_to_csv(r2));
    const auto r3 = speedup_bench({4, 8, 16, 32}, 50, 8, cap, ShuttleConstraints{});
    CHECK(bench_to_csv(r1) != bench_to_csv(r3));
}
