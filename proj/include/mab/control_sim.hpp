#pragma once

#include "mab/core_model.hpp"
#include "mab/waveform.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mab {

enum class Modulation { Sps, OnlineZvs };

std::string_view to_string(Modulation m);

/// Inner ratios for a modulation mode at the given (sampled) bus voltages.
std::vector<double> inner_ratios_for(Modulation mode, std::span<const double> voltages,
                                     std::span<const double> turns_ratios);

/// PI regulator driving one port's outer shift from its bus-voltage error.
struct PiController {
    std::size_t port = 1;      // 0-based; never 0 (the reference port is not controlled)
    double kp = 0.04;          // per volt
    double ki = 100.0;         // per volt-second
    double reference = 0.0;    // V
    double integrator = 0.0;   // same unit as the output
    double output_min = -0.5;
    double output_max = 0.5;
    double output = 0.0;
};

/// Advances one controller by dt and returns the new (clamped) outer shift.
/// The integrator only moves while the output is unsaturated or the error
/// pulls it back out of saturation.
double pi_step(PiController& state, double measured, double dt);

class VoltageCollapse : public std::runtime_error {
public:
    VoltageCollapse(std::size_t port, double time, double voltage);
    std::size_t port() const noexcept { return port_; }
    double time() const noexcept { return time_; }

private:
    std::size_t port_;
    double time_;
};

/// Explicit average-value update of every non-source bus:
///   C_i dV_i/dt = (-P_i - P_load,i(V_i)) / V_i
/// `port_powers` are converter-side powers, positive into the link.
std::vector<double> plant_step(const ConverterConfig& config, std::span<const double> port_powers,
                               std::span<const double> bus_voltages, double dt, double time = 0.0);

/// Outer shifts that balance every non-reference port against its load at
/// the given bus voltages (damped Newton from d = 0). This is the point the
/// PI loops converge to.
PhaseShiftSet solve_outer_shifts(const ConverterConfig& config, std::span<const double> inner,
                                 std::span<const double> voltages);

struct ScenarioEvent {
    double time = 0.0;
    std::size_t port = 1;  // 0-based
    std::optional<double> load;
    std::optional<double> reference;
};

struct SimulationOptions {
    Modulation mode = Modulation::OnlineZvs;
    double duration = 0.0;                 // s
    std::size_t control_period_cycles = 1;  // switching periods per control update
    double eps_current = 0.0;               // A
    double settling_band = 0.02;            // fraction of the final value
    bool start_at_equilibrium = true;
};

struct ScenarioSample {
    double time = 0.0;
    std::vector<double> voltage;
    std::vector<double> power;
    std::vector<double> outer;
    std::vector<double> inner;
    std::vector<ZvsStatus> zvs;
    double total_rms = 0.0;
    double hard_switching_current = 0.0;
};

struct EventSummary {
    ScenarioEvent event;
    std::optional<double> settling_time;  // s; empty when unsettled
    double final_value = 0.0;             // settled port power (load events) or voltage
};

struct ScenarioResult {
    std::vector<ScenarioSample> samples;
    std::vector<EventSummary> events;
    std::vector<std::size_t> regulated_ports;
    std::vector<double> steady_state_error;  // V, per regulated port at the end
    std::vector<double> max_deviation;       // max |V - ref| / ref over the run, per regulated port

    std::vector<double> time() const;
    std::vector<double> voltage(std::size_t port) const;
    std::vector<double> power(std::size_t port) const;
};

/// Closed loop: per control period sample the buses, update D (online rule or
/// zeros), update d through the PI loops, evaluate the steady-state model at
/// (d, D, V) and advance the buses. Throws VoltageCollapse.
ScenarioResult run_scenario(const ConverterConfig& config, std::vector<PiController> controllers,
                            std::vector<ScenarioEvent> events, const SimulationOptions& options);

/// Time from `start` until the series last leaves the band around its final
/// value. The final value is the mean of the last 10% of samples after
/// `start`; the series counts as unsettled if any of those samples is
/// outside the band.
std::optional<double> settling_time(std::span<const double> time, std::span<const double> values,
                                    double start, double band);

/// Controllers for every non-reference port with the given gains and the
/// port setpoints as references.
std::vector<PiController> default_controllers(const ConverterConfig& config, double kp = 0.04,
                                              double ki = 100.0);

}  // namespace mab
