#pragma once

// Brute-force reference for the closed-form steady state. Integrates the
// inductor ODE exactly (constant slope per segment) between bridge edges and
// never touches the closed-form current code.

#include "mab/core_model.hpp"
#include "mab/waveform.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mab::oracle {

struct EventTimeline {
    double half_period = 0.0;
    std::vector<double> breakpoints;                  // s, strictly increasing, starts at 0, < 2T
    std::vector<std::vector<double>> segment_voltage;  // [segment][port], V

    std::size_t segments() const { return breakpoints.size(); }
    double segment_end(std::size_t s) const {
        return s + 1 < breakpoints.size() ? breakpoints[s + 1] : 2.0 * half_period;
    }
};

/// Continuous piecewise-linear currents on [0, 2T].
struct PiecewiseCurrents {
    std::vector<double> knots;                // s, 0 .. 2T inclusive
    std::vector<std::vector<double>> values;  // [port][knot], A

    /// Linear interpolation; t is wrapped into one period.
    double at(std::size_t port, double t) const;
    double mean(std::size_t port) const;
};

EventTimeline build_timeline(const ConverterConfig& config, const PhaseShiftSet& shifts);

EventTimeline build_timeline(const ConverterConfig& config, const PhaseShiftSet& shifts,
                             std::span<const double> live_voltages);

PiecewiseCurrents integrate_currents(const ConverterConfig& config, const EventTimeline& timeline,
                                     std::span<const double> initial);

/// One period from zero initial currents, then each trace shifted to zero mean.
PiecewiseCurrents steady_state_oracle(const ConverterConfig& config, const PhaseShiftSet& shifts);

PiecewiseCurrents steady_state_oracle(const ConverterConfig& config, const PhaseShiftSet& shifts,
                                      std::span<const double> live_voltages);

/// Average of v_si * i_Li over the period for each port.
std::vector<double> oracle_powers(const EventTimeline& timeline, const PiecewiseCurrents& currents);

/// max over ports, breakpoints and segment midpoints of |closed form - oracle| / K_i.
double compare_closed_form(const ConverterConfig& config, const PhaseShiftSet& shifts);

double compare_closed_form(const ConverterConfig& config, const PhaseShiftSet& shifts,
                           std::span<const double> live_voltages);

}  // namespace mab::oracle
