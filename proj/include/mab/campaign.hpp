#pragma once

// Randomized verification campaign: closed form vs. brute-force oracle plus
// the structural invariants of the model and the full-ZVS solution.

#include "mab/core_model.hpp"
#include "mab/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace mab {

/// Deterministic per-draw generator: draw `index` of campaign `seed` always
/// gets the same stream, whatever thread evaluates it.
std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t index);

struct RandomCase {
    ConverterConfig config;
    PhaseShiftSet shifts;
};

/// Random valid converter and shifts with ports in [min_ports, max_ports].
RandomCase random_case(std::mt19937_64& rng, std::size_t min_ports, std::size_t max_ports);

/// Runs fn(i) for i in [0, count) over `threads` workers (0 = hardware).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct CampaignOptions {
    std::uint64_t seed = 1;
    std::size_t draws = 1000;
    std::size_t min_ports = 2;
    std::size_t max_ports = 6;
    unsigned threads = 0;
    // Test hook: offset (in units of K_i) added to the closed-form current
    // before it is compared, to exercise the failure path.
    double injected_fault = 0.0;
};

struct CampaignTolerances {
    double oracle = 1e-9;          // |closed form - oracle| / K_i
    double instant = 1e-9;         // |switching-instant formula - closed form| / K_i
    double antisymmetry = 1e-9;    // |i(t) + i(t + T)| / K_i
    double zero_mean = 1e-9;       // |mean i| / K_i
    double power_balance = 1e-6;   // |sum P| / sum |P|
    double zvs_identity = 1e-12;   // |sum l_i T_i| and online-rule residuals
};

struct CampaignReport {
    std::size_t draws = 0;
    double oracle_error = 0.0;
    double instant_error = 0.0;
    double antisymmetry_error = 0.0;
    double mean_error = 0.0;
    double power_balance_error = 0.0;
    double weighted_term_sum = 0.0;
    double online_residual = 0.0;
    double min_offset_term = 0.0;  // smallest F1/F2/edge-offset value seen
    std::size_t failed_draws = 0;
    CampaignTolerances tolerances;

    bool passed() const { return failed_draws == 0; }
};

CampaignReport run_campaign(const CampaignOptions& options);

}  // namespace mab
