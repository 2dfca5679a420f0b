#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

#include "mab/csv.hpp"
#include "mab/zvs_optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace mab;
using Catch::Approx;

TEST_CASE("numbers round-trip exactly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 2000; ++k) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(k % 30) - 15);
        CHECK(std::stod(csv::format_number(x)) == x);
    }
    CHECK(csv::format_number(0.25) == "0.25");
    CHECK(csv::format_number(-3.0) == "-3");
}

TEST_CASE("waveform export") {
    const auto c = testing::golden();
    const auto inner = online_duty_ratios(c.setpoints(), c.turns_ratios()).inner_ratios;
    const SteadyStateModel m(c, testing::shifts({0, -0.05, 0.03, 0.15}, inner));
    const auto w = m.sample(200, 2);
    std::stringstream buf;
    csv::write_waveforms(buf, w);
    const auto t = csv::read(buf);
    CHECK(t.header == std::vector<std::string>{"t", "v_s1", "v_s2", "v_s3", "v_s4", "i_L1", "i_L2", "i_L3",
                                               "i_L4", "v_H"});
    REQUIRE(t.rows.size() == 400);
    for (std::size_t j = 0; j < 400; j += 17) {
        CHECK(t.number(j, "t") == w.time[j]);
        CHECK(t.number(j, "i_L3") == w.inductor_current[2][j]);
        CHECK(t.number(j, "v_s2") == w.bridge_voltage[1][j]);
        CHECK(t.number(j, "v_H") == w.link_voltage[j]);
    }
    CHECK_THROWS_AS(t.column("i_L9"), std::out_of_range);
}

TEST_CASE("scenario export") {
    ScenarioResult r;
    for (int k = 0; k < 3; ++k) {
        ScenarioSample s;
        s.time = k * 2e-5;
        s.voltage = {400.0, 500.0 + k, 200.0, 300.0};
        s.power = {1300, -400, -500, -400.5};
        s.outer = {0, -0.05, 0.03, 0.15};
        s.inner = {0.25, 0.4, 0.25, 0};
        s.zvs = {ZvsStatus::Zvs, ZvsStatus::Zvs, ZvsStatus::Hard, ZvsStatus::Boundary};
        r.samples.push_back(s);
    }
    std::stringstream buf;
    csv::write_scenario(buf, r);
    const auto t = csv::read(buf);
    CHECK(t.header == std::vector<std::string>{"t", "V_2", "V_3", "V_4", "P_1", "P_2", "P_3", "P_4", "d_2", "d_3",
                                               "d_4", "D_1", "D_2", "D_3", "D_4", "zvs_1", "zvs_2", "zvs_3",
                                               "zvs_4"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.number(2, "V_2") == 502.0);
    CHECK(t.number(1, "P_4") == -400.5);
    CHECK(t.number(0, "D_2") == 0.4);
    CHECK(t.rows[0][t.column("zvs_3")] == "HARD");
}

TEST_CASE("sweep export") {
    const auto c = testing::golden();
    const SteadyStateModel m(c, testing::shifts({0, 0.02, 0.02, 0.02}, {0, 0, 0, 0}));
    std::vector<csv::SweepRow> rows{{3, 200.0, Modulation::Sps, m.report()},
                                    {3, 200.0, Modulation::OnlineZvs, m.report()}};
    std::stringstream buf;
    csv::write_sweep(buf, rows);
    const auto t = csv::read(buf);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header.front() == "port");
    CHECK(t.rows[0][0] == "4");
    CHECK(t.rows[0][t.column("mode")] == "sps");
    CHECK(t.rows[1][t.column("mode")] == "zvs");
    CHECK(t.number(0, "total_rms_a") == rows[0].report.total_rms);
    CHECK(t.number(0, "rms_square_sum_a2") == rows[0].report.rms_square_sum);
    CHECK(t.number(0, "i_rms_2") == rows[0].report.ports[1].rms_current);
    CHECK(t.number(0, "hard_current_a") == rows[0].report.hard_switching_current);
}

TEST_CASE("reader rejects ragged rows") {
    std::stringstream bad("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(csv::read(bad), std::invalid_argument);
    std::stringstream text("a,b\n1,x\n");
    const auto t = csv::read(text);
    CHECK_THROWS_AS(t.number(0, "b"), std::invalid_argument);
}
