#pragma once

#include "mab/core_model.hpp"
#include "mab/waveform.hpp"

#include <random>

namespace mab::testing {

inline PortSpec port(double v, double n, double l, LoadModel load = {LoadKind::Resistor, 100.0}) {
    return {v, n, l, 500e-6, load};
}

// Four-port reference converter: 400/500/200/300 V, 50 kHz.
inline ConverterConfig golden(double l4 = 15e-6, double p4 = 400.0) {
    ConverterConfig c;
    c.switching_frequency = 50e3;
    c.ports = {port(400, 1.0, 15e-6, {LoadKind::VoltageSource, 400.0}),
               port(500, 1.0, 20e-6, {LoadKind::Resistor, 625.0}),
               port(200, 0.5, 8e-6, {LoadKind::Resistor, 80.0}),
               port(300, 1.0, l4, {LoadKind::ConstantPower, p4})};
    return c;
}

// Symmetric 400 V dual active bridge, 30 uH per side.
inline ConverterConfig dab() {
    ConverterConfig c;
    c.switching_frequency = 50e3;
    c.ports = {port(400, 1.0, 30e-6, {LoadKind::VoltageSource, 400.0}), port(400, 1.0, 30e-6)};
    return c;
}

inline ConverterConfig identical(std::size_t n) {
    ConverterConfig c;
    c.switching_frequency = 20e3;
    c.ports.push_back(port(300, 1.0, 10e-6, {LoadKind::VoltageSource, 300.0}));
    for (std::size_t i = 1; i < n; ++i) c.ports.push_back(port(300, 1.0, 10e-6));
    return c;
}

inline PhaseShiftSet shifts(std::vector<double> outer, std::vector<double> inner) {
    return {std::move(outer), std::move(inner)};
}

}  // namespace mab::testing
