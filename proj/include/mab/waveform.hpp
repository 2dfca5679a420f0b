#pragma once

#include "mab/core_model.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mab {

/// Outer (d) and inner (D) phase-shift ratios, both in units of the half
/// period T. Port i's bridge legs switch upward at d_i T and (d_i + D_i) T:
/// v_si steps -V -> 0 at the first edge and 0 -> +V at the second, and the
/// pattern repeats inverted one half period later.
struct PhaseShiftSet {
    std::vector<double> outer;
    std::vector<double> inner;

    static PhaseShiftSet zeros(std::size_t n) { return {std::vector<double>(n), std::vector<double>(n)}; }
};

void validate_shifts(const PhaseShiftSet& shifts, std::size_t ports);

enum class ZvsStatus { Zvs, Boundary, Hard };

std::string_view to_string(ZvsStatus s);

struct InstantCurrents {
    double at_t1 = 0.0;  // i_Li(d_i T)
    double at_t2 = 0.0;  // i_Li((d_i + D_i) T)
};

/// Classification of one port from its two switching-instant currents.
ZvsStatus classify_zvs(InstantCurrents currents, double tolerance);

/// Per-port classification; throws ConfigError on negative tolerance.
std::vector<ZvsStatus> classify_zvs(std::span<const InstantCurrents> currents, double tolerance);

struct PortReport {
    InstantCurrents instant;
    ZvsStatus zvs = ZvsStatus::Boundary;
    double rms_current = 0.0;  // A
    double dc_power = 0.0;     // W, positive = injected into the link
};

struct SteadyStateReport {
    PhaseShiftSet shifts;
    std::vector<double> voltages;
    std::vector<PortReport> ports;
    double total_rms = 0.0;          // sqrt(sum I_rms^2), A
    double rms_square_sum = 0.0;     // sum I_rms^2, A^2
    double rms_sum = 0.0;            // sum I_rms, A
    double hard_switching_current = 0.0;  // sum |i| over edges that switch hard, A
    double power_imbalance = 0.0;    // sum P_i, W

    bool all_soft() const;
};

struct WaveformSeries {
    std::vector<double> time;
    std::vector<std::vector<double>> bridge_voltage;    // [port][sample]
    std::vector<std::vector<double>> inductor_current;  // [port][sample]
    std::vector<double> link_voltage;
};

/// Period-2 even extension of |u| on [-1, 1].
double triangle(double u);

/// F1/F2 as the textbook piecewise branch definitions. They coincide with
/// the exact offset terms used by switching_instant_currents() only when all
/// inner ratios are zero; see edge_offset().
double f1(std::size_t i, std::size_t k, const PhaseShiftSet& shifts);
double f2(std::size_t i, std::size_t k, const PhaseShiftSet& shifts);

/// Exact offset term (tri(u) + tri(u - D) - D) / 2 in closed piecewise form:
/// 0 on [0, D], u - D on [D, 1], 1 - D on [1, 1 + D], 2 - u on [1 + D, 2),
/// with u taken modulo 2. Always non-negative.
double edge_offset(double u, double inner);

/// Closed-form steady state of one converter at one set of phase shifts and
/// DC voltages. Times are in seconds; the model is periodic with period 2T.
class SteadyStateModel {
public:
    SteadyStateModel(const ConverterConfig& config, PhaseShiftSet shifts,
                     std::span<const double> live_voltages);
    SteadyStateModel(const ConverterConfig& config, PhaseShiftSet shifts);

    std::size_t size() const { return voltages_.size(); }
    double half_period() const { return half_period_; }
    const DerivedParams& derived() const { return derived_; }
    const PhaseShiftSet& shifts() const { return shifts_; }
    std::span<const double> voltages() const { return voltages_; }

    double switched_node_voltage(std::size_t port, double t) const;
    double link_voltage(double t) const;
    double inductor_current(std::size_t port, double t) const;

    std::vector<InstantCurrents> switching_instant_currents() const;
    /// The same instants evaluated with the literal f1/f2 terms.
    std::vector<InstantCurrents> branch_instant_currents() const;

    double rms_current(std::size_t port) const;
    double port_power(std::size_t port) const;

    /// Sorted normalized edge times (units of T) in [0, 2), endpoint 2 excluded.
    std::vector<double> breakpoints() const;

    SteadyStateReport report(double eps_current = 0.0) const;
    WaveformSeries sample(std::size_t points_per_period, std::size_t periods = 1) const;

private:
    double current_normalized(std::size_t port, double tau) const;
    void integrate_segments(std::size_t port, double& square, double& power) const;

    std::vector<double> voltages_;
    std::vector<double> turns_;
    PhaseShiftSet shifts_;
    DerivedParams derived_;
    double half_period_;
    double weighted_sum_;
};

double switched_node_voltage(const ConverterConfig& config, const PhaseShiftSet& shifts,
                             std::size_t port, double t);
double link_voltage(const ConverterConfig& config, const PhaseShiftSet& shifts, double t);
double inductor_current(const ConverterConfig& config, const PhaseShiftSet& shifts,
                        std::size_t port, double t);
std::vector<InstantCurrents> switching_instant_currents(const ConverterConfig& config,
                                                       const PhaseShiftSet& shifts,
                                                       std::span<const double> live_voltages);
double rms_current(const ConverterConfig& config, const PhaseShiftSet& shifts, std::size_t port);
double port_power(const ConverterConfig& config, const PhaseShiftSet& shifts, std::size_t port);
WaveformSeries sample_waveforms(const ConverterConfig& config, const PhaseShiftSet& shifts,
                                std::size_t points_per_period, std::size_t periods = 1);

}  // namespace mab
