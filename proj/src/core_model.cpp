#include "mab/core_model.hpp"

#include <cmath>
#include <numeric>

namespace mab {

namespace {

std::string with_port(const std::string& what, std::size_t port) {
    return port == 0 ? what : what + ", port " + std::to_string(port);
}

void check_voltages(std::size_t n, std::span<const double> v) {
    if (v.size() != n) {
        throw ConfigError("expected " + std::to_string(n) + " live voltages, got " +
                          std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0)) throw ConfigError("non-positive voltage", i + 1);
    }
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::size_t port)
    : std::invalid_argument(with_port(what, port)), port_(port) {}

double LoadModel::power_at(double v) const {
    switch (kind) {
        case LoadKind::Resistor: return v * v / value;
        case LoadKind::ConstantPower: return value;
        case LoadKind::VoltageSource: return 0.0;
    }
    return 0.0;
}

std::vector<double> ConverterConfig::setpoints() const {
    std::vector<double> v;
    v.reserve(ports.size());
    for (const auto& p : ports) v.push_back(p.dc_voltage);
    return v;
}

std::vector<double> ConverterConfig::turns_ratios() const {
    std::vector<double> n;
    n.reserve(ports.size());
    for (const auto& p : ports) n.push_back(p.turns_ratio);
    return n;
}

double DerivedParams::weighted_ratio_sum() const {
    return std::transform_reduce(coefficients.begin(), coefficients.end(), ratios.begin(), 0.0);
}

const ConverterConfig& validate_config(const ConverterConfig& config) {
    if (config.ports.size() < 2) throw ConfigError("at least 2 ports are required");
    if (!(config.switching_frequency > 0.0) || !std::isfinite(config.switching_frequency)) {
        throw ConfigError("switching frequency must be positive");
    }
    for (std::size_t i = 0; i < config.ports.size(); ++i) {
        const auto& p = config.ports[i];
        const std::size_t idx = i + 1;
        if (!(p.dc_voltage > 0.0)) throw ConfigError("non-positive dc voltage", idx);
        if (!(p.turns_ratio > 0.0)) throw ConfigError("non-positive turns ratio", idx);
        if (!(p.leakage_inductance > 0.0)) throw ConfigError("non-positive inductance", idx);
        if (!(p.dc_capacitance >= 0.0)) throw ConfigError("negative capacitance", idx);
        switch (p.load.kind) {
            case LoadKind::Resistor:
                if (!(p.load.value > 0.0)) throw ConfigError("non-positive load resistance", idx);
                break;
            case LoadKind::ConstantPower:
                if (!(p.load.value >= 0.0)) throw ConfigError("negative constant-power load", idx);
                break;
            case LoadKind::VoltageSource:
                if (i != 0) throw ConfigError("only the reference port may be a voltage source", idx);
                break;
        }
    }
    return config;
}

std::vector<double> conversion_ratios(const ConverterConfig& config,
                                      std::span<const double> live_voltages) {
    const std::size_t n = config.size();
    check_voltages(n, live_voltages);
    const double n1 = config.ports[0].turns_ratio;
    const double v1 = live_voltages[0];
    std::vector<double> m(n);
    m[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        m[i] = n1 * live_voltages[i] / (config.ports[i].turns_ratio * v1);
    }
    return m;
}

std::vector<double> inductor_coefficients(const ConverterConfig& config) {
    std::vector<double> l;
    l.reserve(config.size());
    for (const auto& p : config.ports) {
        l.push_back(p.turns_ratio * p.turns_ratio / p.leakage_inductance);
    }
    const double total = std::accumulate(l.begin(), l.end(), 0.0);
    for (auto& x : l) x /= total;
    return l;
}

DerivedParams derive_params(const ConverterConfig& config,
                            std::span<const double> live_voltages) {
    validate_config(config);
    DerivedParams out;
    out.ratios = conversion_ratios(config, live_voltages);
    out.coefficients = inductor_coefficients(config);
    const double n1 = config.ports[0].turns_ratio;
    const double t = config.half_period();
    out.current_scales.reserve(config.size());
    for (const auto& p : config.ports) {
        out.current_scales.push_back((p.turns_ratio / n1) * live_voltages[0] * t /
                                     (2.0 * p.leakage_inductance));
    }
    return out;
}

}  // namespace mab
