#include "mab/waveform.hpp"

#include <algorithm>
#include <cmath>

namespace mab {

namespace {

// Wraps u into [0, 2).
double wrap2(double u) {
    double r = u - 2.0 * std::floor(u / 2.0);
    return r >= 2.0 ? 0.0 : r;
}

// +1 on [0, 1), -1 on [1, 2), period 2.
double square(double u) { return wrap2(u) < 1.0 ? 1.0 : -1.0; }

// Two edges closer than this (in units of T) are merged.
constexpr double kEdgeMerge = 1e-13;

// Currents within this fraction of K_i are treated as numerically zero.
constexpr double kCurrentFloor = 1e-9;

}  // namespace

void validate_shifts(const PhaseShiftSet& shifts, std::size_t ports) {
    if (shifts.outer.size() != ports || shifts.inner.size() != ports) {
        throw ConfigError("phase-shift vectors must have one entry per port");
    }
    if (shifts.outer[0] != 0.0) throw ConfigError("reference outer shift d_1 must be zero", 1);
    for (std::size_t i = 0; i < ports; ++i) {
        const double d = shifts.outer[i];
        const double D = shifts.inner[i];
        if (!std::isfinite(d) || d < -0.5 || d > 0.5) {
            throw ConfigError("outer shift outside [-0.5, 0.5]", i + 1);
        }
        if (!std::isfinite(D) || D < 0.0 || D >= 1.0) {
            throw ConfigError("inner shift outside [0, 1)", i + 1);
        }
    }
}

std::string_view to_string(ZvsStatus s) {
    switch (s) {
        case ZvsStatus::Zvs: return "ZVS";
        case ZvsStatus::Boundary: return "BOUNDARY";
        case ZvsStatus::Hard: return "HARD";
    }
    return "?";
}

ZvsStatus classify_zvs(InstantCurrents c, double tolerance) {
    if (tolerance < 0.0) throw ConfigError("negative ZVS current tolerance");
    if (c.at_t1 > tolerance || c.at_t2 > tolerance) return ZvsStatus::Hard;
    if (c.at_t1 < -tolerance && c.at_t2 < -tolerance) return ZvsStatus::Zvs;
    return ZvsStatus::Boundary;
}

std::vector<ZvsStatus> classify_zvs(std::span<const InstantCurrents> currents, double tolerance) {
    std::vector<ZvsStatus> out;
    out.reserve(currents.size());
    for (const auto& c : currents) out.push_back(classify_zvs(c, tolerance));
    return out;
}

bool SteadyStateReport::all_soft() const {
    return std::none_of(ports.begin(), ports.end(),
                        [](const PortReport& p) { return p.zvs == ZvsStatus::Hard; });
}

double triangle(double u) { return std::abs(wrap2(u + 1.0) - 1.0); }

double f1(std::size_t i, std::size_t k, const PhaseShiftSet& s) {
    const double di = s.outer[i], dk = s.outer[k], Di = s.inner[i];
    if (di >= dk) return di - dk;
    if (dk >= di + Di) return std::max(0.0, dk - di - Di);
    return 0.0;
}

double f2(std::size_t i, std::size_t k, const PhaseShiftSet& s) {
    const double di = s.outer[i], dk = s.outer[k], Di = s.inner[i];
    if (di <= dk) return dk - di;
    if (di >= dk + Di) return std::max(0.0, di - Di - dk);
    return 0.0;
}

double edge_offset(double u, double inner) {
    const double v = wrap2(u);
    if (v <= inner) return 0.0;
    if (v <= 1.0) return v - inner;
    if (v <= 1.0 + inner) return 1.0 - inner;
    return 2.0 - v;
}

SteadyStateModel::SteadyStateModel(const ConverterConfig& config, PhaseShiftSet shifts,
                                   std::span<const double> live_voltages)
    : voltages_(live_voltages.begin(), live_voltages.end()),
      turns_(config.turns_ratios()),
      shifts_(std::move(shifts)),
      derived_(derive_params(config, live_voltages)),
      half_period_(config.half_period()),
      weighted_sum_(derived_.weighted_ratio_sum()) {
    validate_shifts(shifts_, config.size());
}

SteadyStateModel::SteadyStateModel(const ConverterConfig& config, PhaseShiftSet shifts)
    : SteadyStateModel(config, std::move(shifts), config.setpoints()) {}

double SteadyStateModel::switched_node_voltage(std::size_t port, double t) const {
    if (port >= size()) throw ConfigError("port index out of range");
    const double tau = t / half_period_;
    const double d = shifts_.outer[port];
    const double D = shifts_.inner[port];
    return voltages_[port] * 0.5 * (square(tau - d) + square(tau - d - D));
}

double SteadyStateModel::link_voltage(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
        v += derived_.coefficients[k] / turns_[k] * switched_node_voltage(k, t);
    }
    return v;
}

double SteadyStateModel::current_normalized(std::size_t i, double tau) const {
    const auto& m = derived_.ratios;
    const auto& l = derived_.coefficients;
    double coupled = 0.0;
    double own = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
        const double d = shifts_.outer[k];
        const double s = triangle(tau - d) + triangle(tau - d - shifts_.inner[k]);
        coupled += l[k] * m[k] * s;
        if (k == i) own = m[k] * s;
    }
    return weighted_sum_ - m[i] + own - coupled;
}

double SteadyStateModel::inductor_current(std::size_t port, double t) const {
    if (port >= size()) throw ConfigError("port index out of range");
    return derived_.current_scales[port] * current_normalized(port, t / half_period_);
}

std::vector<InstantCurrents> SteadyStateModel::switching_instant_currents() const {
    const auto& m = derived_.ratios;
    const auto& l = derived_.coefficients;
    const auto& d = shifts_.outer;
    const auto& D = shifts_.inner;
    std::vector<InstantCurrents> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        double base = -(1.0 - l[i]) * m[i] * (1.0 - D[i]);
        double off1 = 0.0;
        double off2 = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            if (k != i) base += l[k] * m[k] * (1.0 - D[k]);
            off1 += 2.0 * l[k] * m[k] * edge_offset(d[i] - d[k], D[k]);
            off2 += 2.0 * l[k] * m[k] * edge_offset(d[i] + D[i] - d[k], D[k]);
        }
        const double scale = derived_.current_scales[i];
        out[i] = {scale * (base - off1), scale * (base - off2)};
    }
    return out;
}

std::vector<InstantCurrents> SteadyStateModel::branch_instant_currents() const {
    const auto& m = derived_.ratios;
    const auto& l = derived_.coefficients;
    const auto& D = shifts_.inner;
    std::vector<InstantCurrents> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        double base = -(1.0 - l[i]) * m[i] * (1.0 - D[i]);
        double off1 = 0.0;
        double off2 = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            if (k != i) base += l[k] * m[k] * (1.0 - D[k]);
            off1 += 2.0 * l[k] * m[k] * f1(i, k, shifts_);
            off2 += 2.0 * l[k] * m[k] * f2(i, k, shifts_);
        }
        const double scale = derived_.current_scales[i];
        out[i] = {scale * (base - off1), scale * (base - off2)};
    }
    return out;
}

std::vector<double> SteadyStateModel::breakpoints() const {
    std::vector<double> edges;
    edges.reserve(4 * size() + 1);
    edges.push_back(0.0);
    for (std::size_t k = 0; k < size(); ++k) {
        const double a = shifts_.outer[k];
        const double b = a + shifts_.inner[k];
        for (double e : {a, b, a + 1.0, b + 1.0}) edges.push_back(wrap2(e));
    }
    std::sort(edges.begin(), edges.end());
    std::vector<double> out;
    out.reserve(edges.size());
    for (double e : edges) {
        if (out.empty() || e - out.back() > kEdgeMerge) out.push_back(e);
    }
    if (2.0 - out.back() <= kEdgeMerge) out.pop_back();
    return out;
}

// Currents are linear between edges and bridge voltages are constant, so
// both integrals are exact per segment.
void SteadyStateModel::integrate_segments(std::size_t port, double& square_mean,
                                          double& power) const {
    auto knots = breakpoints();
    knots.push_back(2.0);
    const double scale = derived_.current_scales[port];
    double sq = 0.0;
    double pw = 0.0;
    double ia = scale * current_normalized(port, knots[0]);
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double a = knots[s];
        const double b = knots[s + 1];
        const double ib = scale * current_normalized(port, b);
        const double dt = b - a;
        const double v = switched_node_voltage(port, 0.5 * (a + b) * half_period_);
        sq += dt * (ia * ia + ia * ib + ib * ib) / 3.0;
        pw += dt * v * 0.5 * (ia + ib);
        ia = ib;
    }
    square_mean = sq / 2.0;
    power = pw / 2.0;
}

double SteadyStateModel::rms_current(std::size_t port) const {
    if (port >= size()) throw ConfigError("port index out of range");
    double sq = 0.0, pw = 0.0;
    integrate_segments(port, sq, pw);
    return std::sqrt(std::max(sq, 0.0));
}

double SteadyStateModel::port_power(std::size_t port) const {
    if (port >= size()) throw ConfigError("port index out of range");
    double sq = 0.0, pw = 0.0;
    integrate_segments(port, sq, pw);
    return pw;
}

SteadyStateReport SteadyStateModel::report(double eps_current) const {
    if (eps_current < 0.0) throw ConfigError("negative ZVS current tolerance");
    SteadyStateReport r;
    r.shifts = shifts_;
    r.voltages = voltages_;
    r.ports.resize(size());
    const auto instant = switching_instant_currents();
    for (std::size_t i = 0; i < size(); ++i) {
        auto& p = r.ports[i];
        double sq = 0.0;
        integrate_segments(i, sq, p.dc_power);
        p.rms_current = std::sqrt(std::max(sq, 0.0));
        p.instant = instant[i];
        const double tol = std::max(eps_current, kCurrentFloor * derived_.current_scales[i]);
        p.zvs = classify_zvs(p.instant, tol);
        for (double c : {p.instant.at_t1, p.instant.at_t2}) {
            if (c > tol) r.hard_switching_current += std::abs(c);
        }
        r.rms_square_sum += sq;
        r.rms_sum += p.rms_current;
        r.power_imbalance += p.dc_power;
    }
    r.total_rms = std::sqrt(r.rms_square_sum);
    return r;
}

WaveformSeries SteadyStateModel::sample(std::size_t points_per_period, std::size_t periods) const {
    if (points_per_period < 2) throw ConfigError("need at least 2 points per period");
    if (periods < 1) throw ConfigError("need at least 1 period");
    const std::size_t count = points_per_period * periods;
    const double step = 2.0 * half_period_ / static_cast<double>(points_per_period);
    WaveformSeries w;
    w.time.resize(count);
    w.link_voltage.resize(count);
    w.bridge_voltage.assign(size(), std::vector<double>(count));
    w.inductor_current.assign(size(), std::vector<double>(count));
    for (std::size_t j = 0; j < count; ++j) {
        // Sample on the first-period grid so repeats are bit-identical.
        const double t_local = static_cast<double>(j % points_per_period) * step;
        w.time[j] = static_cast<double>(j) * step;
        for (std::size_t k = 0; k < size(); ++k) {
            w.bridge_voltage[k][j] = switched_node_voltage(k, t_local);
            w.inductor_current[k][j] = inductor_current(k, t_local);
        }
        w.link_voltage[j] = link_voltage(t_local);
    }
    return w;
}

double switched_node_voltage(const ConverterConfig& config, const PhaseShiftSet& shifts,
                             std::size_t port, double t) {
    return SteadyStateModel(config, shifts).switched_node_voltage(port, t);
}

double link_voltage(const ConverterConfig& config, const PhaseShiftSet& shifts, double t) {
    return SteadyStateModel(config, shifts).link_voltage(t);
}

double inductor_current(const ConverterConfig& config, const PhaseShiftSet& shifts,
                        std::size_t port, double t) {
    return SteadyStateModel(config, shifts).inductor_current(port, t);
}

std::vector<InstantCurrents> switching_instant_currents(const ConverterConfig& config,
                                                       const PhaseShiftSet& shifts,
                                                       std::span<const double> live_voltages) {
    return SteadyStateModel(config, shifts, live_voltages).switching_instant_currents();
}

double rms_current(const ConverterConfig& config, const PhaseShiftSet& shifts, std::size_t port) {
    return SteadyStateModel(config, shifts).rms_current(port);
}

double port_power(const ConverterConfig& config, const PhaseShiftSet& shifts, std::size_t port) {
    return SteadyStateModel(config, shifts).port_power(port);
}

WaveformSeries sample_waveforms(const ConverterConfig& config, const PhaseShiftSet& shifts,
                                std::size_t points_per_period, std::size_t periods) {
    return SteadyStateModel(config, shifts).sample(points_per_period, periods);
}

}  // namespace mab
