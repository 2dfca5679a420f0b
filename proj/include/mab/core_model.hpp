#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mab {

// Ports are addressed 0-based in the API (port 0 is the reference port).
// User-facing text, CSV headers and scenario files use 1-based numbering.

enum class LoadKind { VoltageSource, Resistor, ConstantPower };

struct LoadModel {
    LoadKind kind = LoadKind::VoltageSource;
    double value = 0.0;  // volts, ohms or watts depending on kind

    /// Power drawn from the DC bus at voltage `v` (zero for a source).
    double power_at(double v) const;
};

struct PortSpec {
    double dc_voltage = 0.0;          // V
    double turns_ratio = 1.0;         // n in "n : 1"
    double leakage_inductance = 0.0;  // H
    double dc_capacitance = 0.0;      // F
    LoadModel load{};
};

struct ConverterConfig {
    std::vector<PortSpec> ports;
    double switching_frequency = 0.0;  // Hz

    std::size_t size() const { return ports.size(); }
    /// T = 1 / (2 f_s); one switching period spans 2T.
    double half_period() const { return 0.5 / switching_frequency; }
    std::vector<double> setpoints() const;
    std::vector<double> turns_ratios() const;
};

/// Raised for every invariant violation on inputs; `port()` is 1-based, 0 if
/// the problem is not tied to a port.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& what, std::size_t port = 0);
    std::size_t port() const noexcept { return port_; }

private:
    std::size_t port_;
};

struct DerivedParams {
    std::vector<double> ratios;          // M_i
    std::vector<double> coefficients;    // l_i, sum to 1
    std::vector<double> current_scales;  // K_i in amperes

    std::size_t size() const { return ratios.size(); }
    /// sum_k l_k M_k
    double weighted_ratio_sum() const;
};

const ConverterConfig& validate_config(const ConverterConfig& config);

std::vector<double> conversion_ratios(const ConverterConfig& config,
                                      std::span<const double> live_voltages);

std::vector<double> inductor_coefficients(const ConverterConfig& config);

DerivedParams derive_params(const ConverterConfig& config,
                            std::span<const double> live_voltages);

}  // namespace mab
