#include "mab/control_sim.hpp"

#include "mab/zvs_optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mab {

std::string_view to_string(Modulation m) {
    return m == Modulation::Sps ? "sps" : "zvs";
}

std::vector<double> inner_ratios_for(Modulation mode, std::span<const double> voltages,
                                     std::span<const double> turns_ratios) {
    if (mode == Modulation::Sps) return sps_duty_ratios(voltages.size());
    return online_duty_ratios(voltages, turns_ratios).inner_ratios;
}

double pi_step(PiController& c, double measured, double dt) {
    if (!(dt > 0.0)) throw ConfigError("controller step must be positive");
    const double error = c.reference - measured;
    const double trial = c.kp * error + c.integrator;
    const bool pushing_high = trial > c.output_max && error > 0.0;
    const bool pushing_low = trial < c.output_min && error < 0.0;
    if (!pushing_high && !pushing_low) {
        c.integrator = std::clamp(c.integrator + c.ki * error * dt, c.output_min, c.output_max);
    }
    c.output = std::clamp(c.kp * error + c.integrator, c.output_min, c.output_max);
    return c.output;
}

VoltageCollapse::VoltageCollapse(std::size_t port, double time, double voltage)
    : std::runtime_error("bus voltage collapse on port " + std::to_string(port + 1) + " at t = " +
                         std::to_string(time) + " s (V = " + std::to_string(voltage) + " V)"),
      port_(port),
      time_(time) {}

std::vector<double> plant_step(const ConverterConfig& config, std::span<const double> port_powers,
                               std::span<const double> bus_voltages, double dt, double time) {
    if (!(dt > 0.0)) throw ConfigError("plant step must be positive");
    const std::size_t n = config.size();
    if (port_powers.size() != n || bus_voltages.size() != n) {
        throw ConfigError("plant step vectors must have one entry per port");
    }
    std::vector<double> next(bus_voltages.begin(), bus_voltages.end());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = config.ports[i];
        if (p.load.kind == LoadKind::VoltageSource) continue;
        const double v = bus_voltages[i];
        if (!(v > 0.0)) throw VoltageCollapse(i, time, v);
        if (p.dc_capacitance > 0.0) {
            next[i] = v + dt * (-port_powers[i] - p.load.power_at(v)) / (p.dc_capacitance * v);
        }
        if (!(next[i] > 0.0)) throw VoltageCollapse(i, time + dt, next[i]);
    }
    return next;
}

PhaseShiftSet solve_outer_shifts(const ConverterConfig& config, std::span<const double> inner,
                                 std::span<const double> voltages) {
    validate_config(config);
    const std::size_t n = config.size();
    if (inner.size() != n || voltages.size() != n) throw ConfigError("vector length mismatch");
    const std::size_t m = n - 1;

    PhaseShiftSet shifts{std::vector<double>(n, 0.0), std::vector<double>(inner.begin(), inner.end())};
    double scale = 1.0;
    Eigen::VectorXd demand(m);
    for (std::size_t i = 1; i < n; ++i) {
        demand(i - 1) = config.ports[i].load.power_at(voltages[i]);
        scale += std::abs(demand(i - 1));
    }
    auto residual = [&](const std::vector<double>& d) {
        const SteadyStateModel model(config, {d, shifts.inner}, voltages);
        Eigen::VectorXd r(m);
        for (std::size_t i = 1; i < n; ++i) r(i - 1) = model.port_power(i) + demand(i - 1);
        return r;
    };

    constexpr double kStep = 1e-7;
    constexpr double kMaxMove = 0.05;
    Eigen::VectorXd r = residual(shifts.outer);
    for (int iter = 0; iter < 200; ++iter) {
        if (r.cwiseAbs().maxCoeff() < 1e-10 * scale) return shifts;
        Eigen::MatrixXd jac(m, m);
        for (std::size_t j = 0; j < m; ++j) {
            auto hi = shifts.outer;
            auto lo = shifts.outer;
            hi[j + 1] = std::min(hi[j + 1] + kStep, 0.5);
            lo[j + 1] = std::max(lo[j + 1] - kStep, -0.5);
            jac.col(static_cast<Eigen::Index>(j)) = (residual(hi) - residual(lo)) / (hi[j + 1] - lo[j + 1]);
        }
        Eigen::VectorXd step = jac.partialPivLu().solve(-r);
        if (!step.allFinite()) break;
        const double largest = step.cwiseAbs().maxCoeff();
        if (largest > kMaxMove) step *= kMaxMove / largest;
        // Backtrack until the residual shrinks.
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            auto trial = shifts.outer;
            for (std::size_t j = 0; j < m; ++j) {
                trial[j + 1] = std::clamp(trial[j + 1] + alpha * step(static_cast<Eigen::Index>(j)), -0.5, 0.5);
            }
            const Eigen::VectorXd rt = residual(trial);
            if (rt.norm() < r.norm()) {
                shifts.outer = std::move(trial);
                r = rt;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }
    if (r.cwiseAbs().maxCoeff() < 1e-6 * scale) return shifts;
    throw std::runtime_error("no equilibrium outer shifts for the requested loads (residual " +
                             std::to_string(r.cwiseAbs().maxCoeff()) + " W)");
}

std::vector<double> ScenarioResult::time() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.time);
    return t;
}

std::vector<double> ScenarioResult::voltage(std::size_t port) const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.voltage.at(port));
    return v;
}

std::vector<double> ScenarioResult::power(std::size_t port) const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.power.at(port));
    return v;
}

std::optional<double> settling_time(std::span<const double> time, std::span<const double> values,
                                    double start, double band) {
    if (!(band > 0.0)) throw ConfigError("settling band must be positive");
    if (time.size() != values.size()) throw ConfigError("time and value series differ in length");
    const auto first = static_cast<std::size_t>(
        std::lower_bound(time.begin(), time.end(), start) - time.begin());
    const std::size_t count = time.size() - first;
    if (count == 0) return std::nullopt;

    const std::size_t tail = std::max<std::size_t>(1, count / 10);
    const std::size_t tail_begin = time.size() - tail;
    const double final_value =
        std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(tail_begin), values.end(), 0.0) /
        static_cast<double>(tail);
    const double width = band * std::max(std::abs(final_value), 1e-12);
    auto outside = [&](std::size_t j) { return std::abs(values[j] - final_value) > width; };

    for (std::size_t j = tail_begin; j < time.size(); ++j) {
        if (outside(j)) return std::nullopt;
    }
    for (std::size_t j = tail_begin; j-- > first;) {
        if (outside(j)) return time[j + 1] - start;
    }
    return 0.0;
}

std::vector<PiController> default_controllers(const ConverterConfig& config, double kp, double ki) {
    std::vector<PiController> out;
    for (std::size_t i = 1; i < config.size(); ++i) {
        PiController c;
        c.port = i;
        c.kp = kp;
        c.ki = ki;
        c.reference = config.ports[i].dc_voltage;
        out.push_back(c);
    }
    return out;
}

ScenarioResult run_scenario(const ConverterConfig& base, std::vector<PiController> controllers,
                            std::vector<ScenarioEvent> events, const SimulationOptions& options) {
    validate_config(base);
    if (!(options.duration > 0.0)) throw ConfigError("scenario duration must be positive");
    if (options.control_period_cycles < 1) throw ConfigError("control period must span at least one cycle");
    for (std::size_t e = 1; e < events.size(); ++e) {
        if (events[e].time < events[e - 1].time) throw ConfigError("event times must be non-decreasing");
    }
    const std::size_t n = base.size();
    for (const auto& c : controllers) {
        if (c.port == 0 || c.port >= n) throw ConfigError("controller attached to an invalid port", c.port + 1);
    }
    for (const auto& e : events) {
        if (e.port >= n) throw ConfigError("event targets an invalid port", e.port + 1);
    }

    ConverterConfig config = base;
    const auto turns = config.turns_ratios();
    const double dt =
        2.0 * config.half_period() * static_cast<double>(options.control_period_cycles);
    std::vector<double> bus = config.setpoints();

    if (options.start_at_equilibrium) {
        const auto inner0 = inner_ratios_for(options.mode, bus, turns);
        const auto eq = solve_outer_shifts(config, inner0, bus);
        for (auto& c : controllers) {
            c.integrator = eq.outer[c.port];
            c.output = eq.outer[c.port];
        }
    }

    ScenarioResult result;
    for (const auto& c : controllers) result.regulated_ports.push_back(c.port);
    result.max_deviation.assign(controllers.size(), 0.0);

    std::vector<double> outer(n, 0.0);
    for (const auto& c : controllers) outer[c.port] = c.output;

    const auto steps = static_cast<std::size_t>(std::llround(options.duration / dt));
    result.samples.reserve(steps);
    std::size_t next_event = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (next_event < events.size() && events[next_event].time <= t + 1e-12 * dt) {
            const auto& e = events[next_event++];
            if (e.load) config.ports[e.port].load.value = *e.load;
            if (e.reference) {
                for (auto& c : controllers) {
                    if (c.port == e.port) c.reference = *e.reference;
                }
            }
        }

        auto inner = inner_ratios_for(options.mode, bus, turns);
        for (auto& c : controllers) outer[c.port] = pi_step(c, bus[c.port], dt);

        const SteadyStateModel model(config, {outer, inner}, bus);
        const auto report = model.report(options.eps_current);

        ScenarioSample s;
        s.time = t;
        s.voltage = bus;
        s.outer = outer;
        s.inner = std::move(inner);
        s.power.reserve(n);
        s.zvs.reserve(n);
        for (const auto& p : report.ports) {
            s.power.push_back(p.dc_power);
            s.zvs.push_back(p.zvs);
        }
        s.total_rms = report.total_rms;
        s.hard_switching_current = report.hard_switching_current;
        for (std::size_t c = 0; c < controllers.size(); ++c) {
            const auto& ctl = controllers[c];
            const double dev = std::abs(bus[ctl.port] - ctl.reference) / ctl.reference;
            result.max_deviation[c] = std::max(result.max_deviation[c], dev);
        }
        bus = plant_step(config, s.power, bus, dt, t);
        result.samples.push_back(std::move(s));
    }

    for (const auto& c : controllers) {
        result.steady_state_error.push_back(result.samples.empty()
                                                ? 0.0
                                                : c.reference - result.samples.back().voltage[c.port]);
    }

    const auto times = result.time();
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        const double end = e + 1 < events.size() ? events[e + 1].time : options.duration;
        const auto stop = static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), end - 1e-12 * dt) - times.begin());
        const auto series = ev.load ? result.power(ev.port) : result.voltage(ev.port);
        const std::span<const double> tspan(times.data(), stop);
        const std::span<const double> vspan(series.data(), stop);
        EventSummary summary;
        summary.event = ev;
        summary.settling_time = settling_time(tspan, vspan, ev.time, options.settling_band);
        summary.final_value = stop > 0 ? vspan.back() : 0.0;
        result.events.push_back(summary);
    }
    return result;
}

}  // namespace mab
