#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

#include "mab/control_sim.hpp"

#include <algorithm>
#include <cmath>

using namespace mab;
using Catch::Approx;

namespace {

SimulationOptions options(double duration, Modulation mode = Modulation::OnlineZvs) {
    SimulationOptions o;
    o.mode = mode;
    o.duration = duration;
    return o;
}

ScenarioEvent load_event(double t, std::size_t port, double value) {
    ScenarioEvent e;
    e.time = t;
    e.port = port;
    e.load = value;
    return e;
}

}  // namespace

TEST_CASE("PI step") {
    PiController c;
    c.kp = 0.001;
    c.ki = 0.0;
    c.reference = 100.0;
    SECTION("zero error leaves the output unchanged") {
        c.integrator = 0.12;
        c.output = 0.12;
        CHECK(pi_step(c, 100.0, 1e-5) == 0.12);
        CHECK(pi_step(c, 100.0, 1e-5) == 0.12);
    }
    SECTION("proportional response to a persistent error") {
        CHECK(pi_step(c, 99.0, 1e-5) == Approx(0.001));
        CHECK(pi_step(c, 99.0, 1e-5) == Approx(0.001));
    }
    SECTION("saturation freezes the integrator") {
        c.kp = 0.04;
        c.ki = 100.0;
        CHECK(pi_step(c, 0.0, 1e-5) == 0.5);
        const double frozen = c.integrator;
        CHECK(pi_step(c, 0.0, 1e-5) == 0.5);
        CHECK(c.integrator == frozen);
        CHECK(pi_step(c, 1e6, 1e-5) == -0.5);
    }
    SECTION("integrator accumulates") {
        c.ki = 10.0;
        c.kp = 0.0;
        for (int k = 0; k < 10; ++k) pi_step(c, 99.0, 1e-3);
        CHECK(c.output == Approx(0.1));
    }
    CHECK_THROWS_AS(pi_step(c, 100.0, 0.0), ConfigError);
}

TEST_CASE("plant update") {
    auto c = testing::golden();
    const double dt = 1e-6;
    SECTION("RC discharge") {
        std::vector<double> v = c.setpoints();
        const std::vector<double> p(4, 0.0);
        const double tau = 80.0 * 500e-6;
        for (int k = 0; k < 1000; ++k) v = plant_step(c, p, v, dt);
        // V dV/dt = -V^2/R / C: exact exponential with time constant RC.
        CHECK(v[2] == Approx(200.0 * std::exp(-1000 * dt / tau)).epsilon(1e-4));
        CHECK(v[0] == 400.0);
    }
    SECTION("matched power holds the bus") {
        const std::vector<double> v = c.setpoints();
        const std::vector<double> p{1300.0, -400.0, -500.0, -400.0};
        const auto next = plant_step(c, p, v, dt);
        for (std::size_t i = 0; i < 4; ++i) CHECK(next[i] == Approx(v[i]).epsilon(1e-15));
    }
    SECTION("collapse reports port and time") {
        const std::vector<double> v = c.setpoints();
        const std::vector<double> p{0.0, 0.0, 0.0, 1e9};
        try {
            plant_step(c, p, v, dt, 0.004);
            FAIL("expected collapse");
        } catch (const VoltageCollapse& e) {
            CHECK(e.port() == 3);
            CHECK(e.time() == Approx(0.004 + dt));
            CHECK(std::string(e.what()).find("port 4") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(plant_step(c, std::vector<double>(3), c.setpoints(), dt), ConfigError);
}

TEST_CASE("balanced outer shifts") {
    const auto c = testing::golden();
    for (auto mode : {Modulation::Sps, Modulation::OnlineZvs}) {
        const auto v = c.setpoints();
        const auto inner = inner_ratios_for(mode, v, c.turns_ratios());
        const auto s = solve_outer_shifts(c, inner, v);
        const SteadyStateModel m(c, s, v);
        CHECK(m.port_power(1) == Approx(-400.0).epsilon(1e-9));
        CHECK(m.port_power(2) == Approx(-500.0).epsilon(1e-9));
        CHECK(m.port_power(3) == Approx(-400.0).epsilon(1e-9));
        CHECK(m.port_power(0) == Approx(1300.0).epsilon(1e-9));
        CHECK(s.inner == inner);
    }
    CHECK(inner_ratios_for(Modulation::Sps, c.setpoints(), c.turns_ratios()) == std::vector<double>(4, 0.0));
    CHECK(inner_ratios_for(Modulation::OnlineZvs, c.setpoints(), c.turns_ratios()) ==
          std::vector<double>{0.25, 0.4, 0.25, 0.0});
    CHECK(to_string(Modulation::Sps) == "sps");
}

TEST_CASE("settling time") {
    std::vector<double> t, v;
    for (int k = 0; k <= 4000; ++k) {
        t.push_back(k * 1e-5);
        v.push_back(5.0);
    }
    CHECK(settling_time(t, v, 0.0, 0.02) == 0.0);

    const double tau = 2e-3;
    for (std::size_t k = 0; k < t.size(); ++k) v[k] = 1.0 - std::exp(-t[k] / tau);
    const auto s = settling_time(t, v, 0.0, 0.02);
    REQUIRE(s.has_value());
    CHECK(*s == Approx(std::log(50.0) * tau).epsilon(5e-3));

    for (std::size_t k = 0; k < t.size(); ++k) v[k] = std::sin(1e4 * t[k]);
    CHECK_FALSE(settling_time(t, v, 0.0, 0.02).has_value());
    CHECK_THROWS_AS(settling_time(t, v, 0.0, 0.0), ConfigError);
}

TEST_CASE("closed loop without events stays at equilibrium") {
    const auto c = testing::golden();
    const auto r = run_scenario(c, default_controllers(c), {}, options(0.002));
    REQUIRE(r.samples.size() == 100);
    CHECK(r.events.empty());
    for (std::size_t p : {1u, 2u, 3u}) {
        for (double x : r.voltage(p)) CHECK(x == Approx(c.ports[p].dc_voltage).epsilon(1e-9));
    }
    for (double d : r.max_deviation) CHECK(d < 1e-9);
}

TEST_CASE("load steps on port 4") {
    const auto c = testing::golden();
    for (auto mode : {Modulation::OnlineZvs, Modulation::Sps}) {
        CAPTURE(to_string(mode));
        const auto r = run_scenario(c, default_controllers(c),
                                    {load_event(0.002, 3, 2000.0), load_event(0.008, 3, 400.0)},
                                    options(0.014, mode));
        REQUIRE(r.events.size() == 2);
        for (const auto& e : r.events) {
            REQUIRE(e.settling_time.has_value());
            CHECK(*e.settling_time <= 5e-3);
        }
        CHECK(r.events[0].final_value == Approx(-2000.0).epsilon(1e-3));
        CHECK(r.events[1].final_value == Approx(-400.0).epsilon(1e-3));
        CHECK(r.max_deviation[0] < 0.02);
        CHECK(r.max_deviation[1] < 0.02);
        for (double e : r.steady_state_error) CHECK(std::abs(e) < 0.01);
        const auto times = r.time();
        CHECK(times[1] - times[0] == Approx(20e-6));
    }
}

TEST_CASE("reference step") {
    const auto c = testing::golden();
    ScenarioEvent e;
    e.time = 0.001;
    e.port = 1;
    e.reference = 510.0;
    const auto r = run_scenario(c, default_controllers(c), {e}, options(0.012));
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].settling_time.has_value());
    CHECK(r.voltage(1).back() == Approx(510.0).epsilon(1e-3));
}

TEST_CASE("scenario input checks") {
    const auto c = testing::golden();
    CHECK_THROWS_AS(run_scenario(c, default_controllers(c), {}, options(0.0)), ConfigError);
    CHECK_THROWS_AS(run_scenario(c, default_controllers(c), {load_event(0.002, 3, 1.0), load_event(0.001, 3, 1.0)},
                                 options(0.003)),
                    ConfigError);
    auto bad = default_controllers(c);
    bad[0].port = 0;
    CHECK_THROWS_AS(run_scenario(c, bad, {}, options(0.001)), ConfigError);
    CHECK_THROWS_AS(run_scenario(c, default_controllers(c), {load_event(0.0, 7, 1.0)}, options(0.001)), ConfigError);
    CHECK_THROWS_AS(run_scenario(c, default_controllers(c), {load_event(0.001, 3, 2e5)}, options(0.005)),
                    VoltageCollapse);
}
