#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

#include "mab/campaign.hpp"
#include "mab/zvs_optimizer.hpp"

#include <algorithm>
#include <cmath>

using namespace mab;
using Catch::Approx;

namespace {

DerivedParams golden_params() {
    const auto c = testing::golden();
    return derive_params(c, c.setpoints());
}

}  // namespace

TEST_CASE("full-ZVS term") {
    const auto d = golden_params();
    const double a = 101.0 / 103.0;
    SECTION("two-level modulation") {
        const auto zero = sps_duty_ratios(4);
        CHECK(full_zvs_term(d, zero, 3) == Approx(a - 0.75).epsilon(1e-13));
        CHECK(full_zvs_term(d, zero, 3) == Approx(0.230583).margin(1e-6));
        CHECK(full_zvs_term(d, zero, 1) == Approx(a - 1.25).epsilon(1e-13));
        const auto r = zvs_system_residual(d, zero);
        const std::vector<double> expected{a - 1.0, a - 1.25, a - 1.0, a - 0.75};
        for (std::size_t i = 0; i < 4; ++i) CHECK(r[i] == Approx(expected[i]).epsilon(1e-13));
    }
    SECTION("online duties zero every term") {
        const std::vector<double> duty{0.25, 0.4, 0.25, 0.0};
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(full_zvs_term(d, duty, i)) < 1e-15);
        for (double x : zvs_system_residual(d, duty)) CHECK(std::abs(x) < 1e-15);
    }
    SECTION("equal ratios") {
        const auto c = testing::identical(5);
        const auto e = derive_params(c, c.setpoints());
        for (double x : zvs_system_residual(e, sps_duty_ratios(5))) CHECK(std::abs(x) < 1e-15);
    }
    CHECK_THROWS_AS(full_zvs_term(d, sps_duty_ratios(3), 0), ConfigError);
    CHECK_THROWS_AS(full_zvs_term(d, sps_duty_ratios(4), 4), ConfigError);
}

TEST_CASE("general solution") {
    const std::vector<double> m{1.0, 1.25, 1.0, 0.75};
    const auto s = general_solution(m, 0.5);
    CHECK(s.inner_ratios[0] == Approx(0.5));
    CHECK(s.inner_ratios[1] == Approx(0.6));
    CHECK(s.inner_ratios[2] == Approx(0.5));
    CHECK(s.inner_ratios[3] == Approx(1.0 / 3.0));
    CHECK(s.min_ratio_port == 3);
    CHECK(s.residual_norm < 1e-15);

    const std::vector<double> equal{1.3, 1.3, 1.3};
    for (double x : general_solution(equal, 1.3).inner_ratios) CHECK(x == 0.0);
    CHECK_THROWS_AS(general_solution(m, 1.1 * 0.75), ConfigError);
    CHECK_THROWS_AS(general_solution(m, 0.0), ConfigError);
    CHECK_THROWS_AS(general_solution(std::vector<double>{}, 0.5), ConfigError);
}

TEST_CASE("online rule") {
    const auto c = testing::golden();
    const auto s = online_duty_ratios(c.setpoints(), c.turns_ratios());
    CHECK(s.inner_ratios == std::vector<double>{0.25, 0.4, 0.25, 0.0});
    CHECK(s.min_ratio_port == 3);
    CHECK(s.lambda == 0.75);

    const auto same = testing::identical(3);
    for (double x : online_duty_ratios(same.setpoints(), same.turns_ratios()).inner_ratios) CHECK(x == 0.0);

    const std::vector<double> v{100, 200}, n{1, 1};
    CHECK(online_duty_ratios(v, n).inner_ratios == std::vector<double>{0.0, 0.5});

    const std::vector<double> tie{200, 100, 100}, ones{1, 1, 1};
    CHECK(online_duty_ratios(tie, ones).min_ratio_port == 1);
    const std::vector<double> bad{100, -1};
    CHECK_THROWS_AS(online_duty_ratios(bad, n), ConfigError);
    CHECK_THROWS_AS(online_duty_ratios(v, ones), ConfigError);
}

TEST_CASE("two-level duties") {
    CHECK(sps_duty_ratios(4) == std::vector<double>(4, 0.0));
    CHECK(sps_duty_ratios(2) == std::vector<double>(2, 0.0));
    CHECK_THROWS_AS(sps_duty_ratios(1), ConfigError);
}

TEST_CASE("full-ZVS identities on random converters") {
    for (std::uint64_t draw = 0; draw < 2000; ++draw) {
        auto rng = draw_rng(4242, draw);
        const auto rc = random_case(rng, 2, 8);
        const auto d = derive_params(rc.config, rc.config.setpoints());
        double weighted = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            weighted += d.coefficients[i] * full_zvs_term(d, rc.shifts.inner, i);
        }
        REQUIRE(std::abs(weighted) <= 1e-12);

        const auto online = online_duty_ratios(rc.config.setpoints(), rc.config.turns_ratios());
        REQUIRE(online.inner_ratios[online.min_ratio_port] == 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            REQUIRE(online.inner_ratios[i] >= 0.0);
            REQUIRE(online.inner_ratios[i] < 1.0);
            REQUIRE(std::abs(full_zvs_term(d, online.inner_ratios, i)) <= 1e-12);
        }
        for (double x : zvs_system_residual(d, online.inner_ratios)) REQUIRE(std::abs(x) <= 1e-12);
    }
}

TEST_CASE("inner ratios shrink monotonically as lambda grows") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int draw = 0; draw < 500; ++draw) {
        std::vector<double> m(2 + draw % 7);
        for (auto& x : m) x = u(rng);
        const double lo = *std::min_element(m.begin(), m.end());
        const auto a = general_solution(m, 0.3 * lo);
        const auto b = general_solution(m, 0.7 * lo);
        const auto c = general_solution(m, lo);
        for (std::size_t i = 0; i < m.size(); ++i) {
            REQUIRE(a.inner_ratios[i] > b.inner_ratios[i]);
            REQUIRE(b.inner_ratios[i] > c.inner_ratios[i] - 1e-15);
        }
        REQUIRE(c.inner_ratios[c.min_ratio_port] == 0.0);
    }
}
