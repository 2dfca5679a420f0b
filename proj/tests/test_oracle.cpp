#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

#include "mab/campaign.hpp"
#include "mab/oracle.hpp"
#include "mab/zvs_optimizer.hpp"

#include <cmath>

using namespace mab;
using Catch::Approx;

TEST_CASE("timeline breakpoints") {
    const auto dab = testing::dab();
    const double T = dab.half_period();
    SECTION("no shifts") {
        const auto tl = oracle::build_timeline(dab, PhaseShiftSet::zeros(2));
        REQUIRE(tl.segments() == 2);
        CHECK(tl.breakpoints[0] == 0.0);
        CHECK(tl.breakpoints[1] == Approx(T));
        CHECK(tl.segment_end(1) == Approx(2 * T));
    }
    SECTION("dual active bridge") {
        const auto tl = oracle::build_timeline(dab, testing::shifts({0, 0.25}, {0, 0}));
        REQUIRE(tl.segments() == 4);
        CHECK(tl.breakpoints[1] == Approx(0.25 * T));
        CHECK(tl.breakpoints[2] == Approx(T));
        CHECK(tl.breakpoints[3] == Approx(1.25 * T));
        CHECK(tl.segment_voltage[0] == std::vector<double>{400.0, -400.0});
        CHECK(tl.segment_voltage[1] == std::vector<double>{400.0, 400.0});
    }
    SECTION("golden point respects the counting bound") {
        const auto c = testing::golden();
        const auto tl = oracle::build_timeline(c, testing::shifts({0, -0.05, 0.0324, 0.15}, {0.25, 0.4, 0.25, 0}));
        CHECK(tl.segments() <= 16);
        for (std::size_t s = 1; s < tl.segments(); ++s) CHECK(tl.breakpoints[s] > tl.breakpoints[s - 1]);
        CHECK(tl.breakpoints.back() < 2 * c.half_period());
    }
}

TEST_CASE("integration") {
    const auto dab = testing::dab();
    SECTION("zero drive keeps the initial currents") {
        const auto tl = oracle::build_timeline(testing::identical(3), PhaseShiftSet::zeros(3));
        const std::vector<double> init{1.0, -2.0, 1.0};
        const auto pc = oracle::integrate_currents(testing::identical(3), tl, init);
        for (std::size_t p = 0; p < 3; ++p) {
            for (double v : pc.values[p]) CHECK(v == Approx(init[p]).margin(1e-9));
        }
    }
    SECTION("slope seen by port 1") {
        const auto tl = oracle::build_timeline(dab, testing::shifts({0, 0.25}, {0, 0}));
        const std::vector<double> init{0.0, 0.0};
        const auto pc = oracle::integrate_currents(dab, tl, init);
        CHECK(pc.values[0][1] / pc.knots[1] == Approx(800.0 / 60e-6));
        CHECK(pc.values[0].back() == Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(oracle::integrate_currents(dab, oracle::build_timeline(dab, PhaseShiftSet::zeros(2)),
                                               std::vector<double>{0.0}),
                    ConfigError);
}

TEST_CASE("steady-state reference") {
    const auto dab = testing::dab();
    const auto s = testing::shifts({0, 0.25}, {0, 0});
    const auto pc = oracle::steady_state_oracle(dab, s);
    CHECK(pc.at(0, 0.0) == Approx(-50.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(pc.mean(0)) < 1e-12);
    const auto tl = oracle::build_timeline(dab, s);
    const auto p = oracle::oracle_powers(tl, pc);
    CHECK(p[0] == Approx(5000.0));
    CHECK(p[1] == Approx(-5000.0));
    CHECK(oracle::compare_closed_form(dab, s) <= 1e-12);

    const auto zero = oracle::steady_state_oracle(testing::identical(4), PhaseShiftSet::zeros(4));
    for (const auto& trace : zero.values) {
        for (double v : trace) CHECK(v == 0.0);
    }
    CHECK(oracle::compare_closed_form(testing::identical(4), PhaseShiftSet::zeros(4)) == 0.0);
}

TEST_CASE("reference is half-wave antisymmetric and matches the closed form") {
    for (std::uint64_t draw = 0; draw < 300; ++draw) {
        auto rng = draw_rng(5150, draw);
        const auto rc = random_case(rng, 2, 6);
        const auto pc = oracle::steady_state_oracle(rc.config, rc.shifts);
        const double T = rc.config.half_period();
        const auto k = derive_params(rc.config, rc.config.setpoints()).current_scales;
        for (std::size_t i = 0; i < rc.config.size(); ++i) {
            for (int j = 0; j < 16; ++j) {
                const double t = (j + 0.31) * T / 16.0;
                REQUIRE(std::abs(pc.at(i, t) + pc.at(i, t + T)) <= 1e-12 * k[i] * 10.0);
            }
        }
        REQUIRE(oracle::compare_closed_form(rc.config, rc.shifts) <= 1e-9);
    }
}

TEST_CASE("reference at live voltages") {
    const auto c = testing::golden();
    const std::vector<double> live{400, 490, 205, 295};
    const auto d = online_duty_ratios(live, c.turns_ratios());
    const auto s = testing::shifts({0, -0.04, 0.02, 0.12}, d.inner_ratios);
    CHECK(oracle::compare_closed_form(c, s, live) <= 1e-9);
    CHECK_THROWS_AS(oracle::build_timeline(c, s, std::vector<double>{400, 500}), ConfigError);
}
