#pragma once

#include "mab/control_sim.hpp"
#include "mab/core_model.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mab {

struct SweepSpec {
    std::size_t port = 3;  // 0-based
    double from = 200.0;   // W
    double to = 2000.0;    // W
    std::size_t steps = 10;

    std::vector<double> points() const;
};

/// Everything a scenario file describes, already validated.
struct ScenarioFile {
    ConverterConfig converter;
    Modulation mode = Modulation::OnlineZvs;
    std::vector<PiController> controllers;
    std::vector<ScenarioEvent> events;
    SimulationOptions simulation;
    std::size_t points_per_period = 2000;
    std::size_t periods = 1;
    std::optional<SweepSpec> sweep;
    std::size_t verify_draws = 1000;
    std::string output_dir = "out";
};

/// Parse or validation failure; the message carries "line:col" for syntax
/// errors and the JSON path (e.g. converter.ports[2].leakage_inductance_h)
/// for schema errors.
class ScenarioError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

ScenarioFile parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace mab
