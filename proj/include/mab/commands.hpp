#pragma once

// Front-end commands shared by the mabsim tool and the CLI tests. Each
// returns the process exit status.

#include "mab/control_sim.hpp"
#include "mab/csv.hpp"
#include "mab/scenario_file.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace mab::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kRuntimeFailure = 2,
    kVerificationFailure = 3,
};

struct CommandOptions {
    std::filesystem::path config;
    std::optional<Modulation> mode;
    std::optional<std::filesystem::path> out;
    std::uint64_t seed = 1;
    std::optional<double> eps_current;
    std::vector<std::pair<std::size_t, double>> loads;  // 1-based port, new load value
    std::optional<std::vector<double>> outer;            // explicit d_2..d_N
    std::optional<std::size_t> sweep_port;               // 1-based
    std::optional<double> sweep_from;
    std::optional<double> sweep_to;
    std::optional<std::size_t> sweep_steps;
    std::optional<std::size_t> draws;
    unsigned threads = 0;
    double injected_fault = 0.0;  // verify only; not reachable from the command line
};

/// Applies --load overrides to the scenario's converter.
void apply_loads(ScenarioFile& scenario, const std::vector<std::pair<std::size_t, double>>& loads);

/// Equilibrium steady state of one mode at the scenario's current loads.
SteadyStateReport operating_point(const ScenarioFile& scenario, Modulation mode);

struct Comparison {
    SteadyStateReport sps;
    SteadyStateReport zvs;
    /// sum I_rms^2 (ZVS) / sum I_rms^2 (SPS)
    double rms_ratio() const;
    /// sum I_rms (ZVS) / sum I_rms (SPS)
    double rms_sum_ratio() const;
};

Comparison compare_modes(const ScenarioFile& scenario);

std::vector<csv::SweepRow> sweep_rows(const ScenarioFile& scenario, const SweepSpec& spec, unsigned threads);

int cmd_steady(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_dynamic(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace mab::cli
