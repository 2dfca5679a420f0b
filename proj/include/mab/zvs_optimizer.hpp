#pragma once

#include "mab/core_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mab {

struct ZvsSolution {
    std::vector<double> inner_ratios;
    double lambda = 0.0;
    std::size_t min_ratio_port = 0;  // 0-based; lowest index among ties
    // max_i |M_i (1 - D_i) - lambda|. Needs no inductances and bounds every
    // full-ZVS row residual by twice its value, whatever l is.
    double residual_norm = 0.0;
};

/// Load-independent part of port i's switching-instant current, in units of
/// K_i: sum_{k != i} l_k M_k (1 - D_k) - (1 - l_i) M_i (1 - D_i).
double full_zvs_term(const DerivedParams& derived, std::span<const double> inner, std::size_t port);

/// Row residuals (A D - b) of the full-ZVS linear system. Entry i reduces
/// algebraically to T_i, so the vector is zero iff full ZVS holds.
std::vector<double> zvs_system_residual(const DerivedParams& derived, std::span<const double> inner);

/// D_i = 1 - lambda / M_i for lambda in (0, min M].
ZvsSolution general_solution(std::span<const double> ratios, double lambda);

/// Online rule: lambda = min M computed from sampled voltages.
ZvsSolution online_duty_ratios(std::span<const double> live_voltages,
                               std::span<const double> turns_ratios);

std::vector<double> sps_duty_ratios(std::size_t ports);

}  // namespace mab
