#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "raster/kernels.hpp"

using raster::kernels::Backend;
using raster::kernels::Ops;

namespace {

std::vector<std::complex<double>> random_complex(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<std::complex<double>> v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    return v;
}

std::vector<double> random_real(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

// odd sizes exercise every tail-handling path
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 1000, 4096, 65537};

}  // namespace

TEST_CASE("scalar backend is always available") {
    const auto backends = raster::kernels::available_backends();
    CHECK(std::find(backends.begin(), backends.end(), Backend::scalar) !=
          backends.end());
    CHECK(raster::kernels::ops_for(Backend::scalar) != nullptr);
}

TEST_CASE("every available backend matches the scalar reference") {
    const Ops& ref = raster::kernels::scalar_ops();
    for (Backend backend : raster::kernels::available_backends()) {
        const Ops* ops = raster::kernels::ops_for(backend);
        REQUIRE(ops != nullptr);
        INFO("backend ", std::string(ops->name));
        unsigned seed = 100;
        for (std::size_t n : kSizes) {
            const auto z = random_complex(n, seed);
            std::vector<double> got(n), want(n);
            ops->magnitude_squared(z.data(), got.data(), n);
            ref.magnitude_squared(z.data(), want.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(got[i], want[i], 1e-12));

            const auto x = random_real(n, seed + 1);
            CHECK(close(ops->sum(x.data(), n), ref.sum(x.data(), n), 1e-12));
            CHECK(ops->max_value(x.data(), n) == ref.max_value(x.data(), n));

            auto a = x, b = x;
            ops->scale(a.data(), n, 0.37);
            ref.scale(b.data(), n, 0.37);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(a[i], b[i], 1e-12));
            seed += 2;
        }
    }
}

TEST_CASE("magnitude_squared is exact on lattice values") {
    std::vector<std::complex<double>> z{{3, 4}, {0, 0}, {-2, 1}, {5, -12}, {1, 1}};
    for (Backend backend : raster::kernels::available_backends()) {
        const Ops* ops = raster::kernels::ops_for(backend);
        std::vector<double> out(z.size());
        ops->magnitude_squared(z.data(), out.data(), z.size());
        CHECK(out[0] == 25.0);
        CHECK(out[1] == 0.0);
        CHECK(out[2] == 5.0);
        CHECK(out[3] == 169.0);
        CHECK(out[4] == 2.0);
    }
}

TEST_CASE("max handles negative-only arrays and single elements") {
    const std::vector<double> neg{-5.0, -1.0, -9.0};
    for (Backend backend : raster::kernels::available_backends()) {
        const Ops* ops = raster::kernels::ops_for(backend);
        CHECK(ops->max_value(neg.data(), neg.size()) == -1.0);
        CHECK(ops->max_value(neg.data(), 1) == -5.0);
    }
}

TEST_CASE("select pins the active backend; reset restores autodetection") {
    raster::kernels::select(Backend::scalar);
    CHECK(std::string(raster::kernels::active().name) == "scalar");
    raster::kernels::reset();
    bool found = false;
    for (Backend backend : raster::kernels::available_backends())
        if (raster::kernels::ops_for(backend) == &raster::kernels::active())
            found = true;
    CHECK(found);
    const bool have_avx2 = raster::kernels::ops_for(Backend::avx2) != nullptr;
    const bool have_neon = raster::kernels::ops_for(Backend::neon) != nullptr;
    if (!have_avx2) CHECK_THROWS_AS(raster::kernels::select(Backend::avx2), std::runtime_error);
    if (!have_neon) CHECK_THROWS_AS(raster::kernels::select(Backend::neon), std::runtime_error);
    raster::kernels::reset();
}
