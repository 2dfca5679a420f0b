#include "mab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mab::oracle {

namespace {

constexpr double kMerge = 1e-13;  // relative to T

double wrap(double t, double period) {
    double r = t - period * std::floor(t / period);
    return r >= period ? 0.0 : r;
}

// Bridge state from the leg phases: +1 while both upper switches conduct,
// -1 while both lower ones do, 0 otherwise. `phase` is in units of T.
int bridge_state(double phase, double inner) {
    if (phase < inner) return 0;
    if (phase < 1.0) return 1;
    if (phase < 1.0 + inner) return 0;
    return -1;
}

}  // namespace

double PiecewiseCurrents::at(std::size_t port, double t) const {
    const double period = knots.back();
    const double tw = wrap(t, period);
    auto it = std::upper_bound(knots.begin(), knots.end(), tw);
    const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - knots.begin()), knots.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = knots[hi] - knots[lo];
    const double w = span > 0.0 ? (tw - knots[lo]) / span : 0.0;
    return values[port][lo] + w * (values[port][hi] - values[port][lo]);
}

double PiecewiseCurrents::mean(std::size_t port) const {
    double area = 0.0;
    const auto& v = values[port];
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        area += 0.5 * (v[s] + v[s + 1]) * (knots[s + 1] - knots[s]);
    }
    return area / knots.back();
}

EventTimeline build_timeline(const ConverterConfig& config, const PhaseShiftSet& shifts,
                             std::span<const double> live_voltages) {
    validate_config(config);
    validate_shifts(shifts, config.size());
    if (live_voltages.size() != config.size()) throw ConfigError("live voltage vector has wrong length");

    EventTimeline tl;
    tl.half_period = config.half_period();
    const double T = tl.half_period;

    std::vector<double> edges{0.0};
    for (std::size_t k = 0; k < config.size(); ++k) {
        const double a = shifts.outer[k];
        const double b = a + shifts.inner[k];
        for (double e : {a, b, a + 1.0, b + 1.0}) edges.push_back(wrap(e, 2.0));
    }
    std::sort(edges.begin(), edges.end());
    for (double e : edges) {
        if (tl.breakpoints.empty() || e - tl.breakpoints.back() / T > kMerge) tl.breakpoints.push_back(e * T);
    }
    if (2.0 - tl.breakpoints.back() / T <= kMerge) tl.breakpoints.pop_back();

    tl.segment_voltage.resize(tl.breakpoints.size());
    for (std::size_t s = 0; s < tl.breakpoints.size(); ++s) {
        const double mid = 0.5 * (tl.breakpoints[s] + tl.segment_end(s)) / T;
        auto& v = tl.segment_voltage[s];
        v.resize(config.size());
        for (std::size_t k = 0; k < config.size(); ++k) {
            const double phase = wrap(mid - shifts.outer[k], 2.0);
            v[k] = live_voltages[k] * bridge_state(phase, shifts.inner[k]);
        }
    }
    return tl;
}

EventTimeline build_timeline(const ConverterConfig& config, const PhaseShiftSet& shifts) {
    return build_timeline(config, shifts, config.setpoints());
}

PiecewiseCurrents integrate_currents(const ConverterConfig& config, const EventTimeline& timeline,
                                     std::span<const double> initial) {
    const std::size_t n = config.size();
    if (initial.size() != n) throw ConfigError("initial current vector has wrong length");
    const auto l = inductor_coefficients(config);

    PiecewiseCurrents pc;
    pc.knots = timeline.breakpoints;
    pc.knots.push_back(2.0 * timeline.half_period);
    pc.values.assign(n, std::vector<double>(pc.knots.size()));
    std::vector<double> current(initial.begin(), initial.end());
    for (std::size_t k = 0; k < n; ++k) pc.values[k][0] = current[k];

    for (std::size_t s = 0; s < timeline.segments(); ++s) {
        const auto& v = timeline.segment_voltage[s];
        double link = 0.0;
        for (std::size_t k = 0; k < n; ++k) link += l[k] / config.ports[k].turns_ratio * v[k];
        const double dt = timeline.segment_end(s) - timeline.breakpoints[s];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = config.ports[i];
            const double slope = (v[i] - p.turns_ratio * link) / p.leakage_inductance;
            current[i] += slope * dt;
            pc.values[i][s + 1] = current[i];
        }
    }
    return pc;
}

PiecewiseCurrents steady_state_oracle(const ConverterConfig& config, const PhaseShiftSet& shifts,
                                      std::span<const double> live_voltages) {
    const auto tl = build_timeline(config, shifts, live_voltages);
    const std::vector<double> zero(config.size(), 0.0);
    auto pc = integrate_currents(config, tl, zero);
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double m = pc.mean(i);
        for (auto& x : pc.values[i]) x -= m;
    }
    return pc;
}

PiecewiseCurrents steady_state_oracle(const ConverterConfig& config, const PhaseShiftSet& shifts) {
    return steady_state_oracle(config, shifts, config.setpoints());
}

std::vector<double> oracle_powers(const EventTimeline& timeline, const PiecewiseCurrents& currents) {
    const std::size_t n = currents.values.size();
    std::vector<double> p(n, 0.0);
    for (std::size_t s = 0; s < timeline.segments(); ++s) {
        const double dt = timeline.segment_end(s) - timeline.breakpoints[s];
        for (std::size_t i = 0; i < n; ++i) {
            p[i] += timeline.segment_voltage[s][i] * 0.5 *
                    (currents.values[i][s] + currents.values[i][s + 1]) * dt;
        }
    }
    for (auto& x : p) x /= 2.0 * timeline.half_period;
    return p;
}

double compare_closed_form(const ConverterConfig& config, const PhaseShiftSet& shifts,
                           std::span<const double> live_voltages) {
    const auto reference = steady_state_oracle(config, shifts, live_voltages);
    const SteadyStateModel model(config, shifts, live_voltages);
    const auto& scales = model.derived().current_scales;

    std::vector<double> probes;
    probes.reserve(2 * reference.knots.size());
    for (std::size_t s = 0; s + 1 < reference.knots.size(); ++s) {
        probes.push_back(reference.knots[s]);
        probes.push_back(0.5 * (reference.knots[s] + reference.knots[s + 1]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        for (double t : probes) {
            const double err = std::abs(model.inductor_current(i, t) - reference.at(i, t)) / scales[i];
            worst = std::max(worst, err);
        }
    }
    return worst;
}

double compare_closed_form(const ConverterConfig& config, const PhaseShiftSet& shifts) {
    return compare_closed_form(config, shifts, config.setpoints());
}

}  // namespace mab::oracle
