#include "mab/zvs_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mab {

namespace {

// Row i of A D - b is sum_k l_k w_k - w_i with w_i = M_i (1 - D_i), so
// max |w_i - lambda| bounds it without knowing l.
double solution_residual(std::span<const double> m, const std::vector<double>& d, double lambda) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) r = std::max(r, std::abs(m[i] * (1.0 - d[i]) - lambda));
    return r;
}

}  // namespace

double full_zvs_term(const DerivedParams& derived, std::span<const double> inner, std::size_t port) {
    const auto& m = derived.ratios;
    const auto& l = derived.coefficients;
    if (inner.size() != m.size()) throw ConfigError("inner ratio vector has wrong length");
    if (port >= m.size()) throw ConfigError("port index out of range");
    double t = -(1.0 - l[port]) * m[port] * (1.0 - inner[port]);
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (k != port) t += l[k] * m[k] * (1.0 - inner[k]);
    }
    return t;
}

std::vector<double> zvs_system_residual(const DerivedParams& derived, std::span<const double> inner) {
    const auto& m = derived.ratios;
    const auto& l = derived.coefficients;
    const std::size_t n = m.size();
    if (inner.size() != n) throw ConfigError("inner ratio vector has wrong length");
    const double rhs_offset = derived.weighted_ratio_sum();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = (k == i ? (1.0 - l[k]) : -l[k]) * m[k];
            row += a * inner[k];
        }
        r[i] = row - (m[i] - rhs_offset);
    }
    return r;
}

ZvsSolution general_solution(std::span<const double> ratios, double lambda) {
    if (ratios.empty()) throw ConfigError("empty ratio vector");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0)) throw ConfigError("non-positive conversion ratio", i + 1);
    }
    const auto min_it = std::min_element(ratios.begin(), ratios.end());
    if (!(lambda > 0.0) || lambda > *min_it) {
        throw ConfigError("lambda " + std::to_string(lambda) + " outside (0, min M = " +
                          std::to_string(*min_it) + "]");
    }
    ZvsSolution s;
    s.lambda = lambda;
    s.min_ratio_port = static_cast<std::size_t>(min_it - ratios.begin());
    s.inner_ratios.reserve(ratios.size());
    for (double m : ratios) s.inner_ratios.push_back(1.0 - lambda / m);
    s.residual_norm = solution_residual(ratios, s.inner_ratios, lambda);
    return s;
}

ZvsSolution online_duty_ratios(std::span<const double> live_voltages,
                               std::span<const double> turns_ratios) {
    const std::size_t n = live_voltages.size();
    if (n < 2 || turns_ratios.size() != n) throw ConfigError("voltage and turns-ratio vectors must match");
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(live_voltages[i] > 0.0)) throw ConfigError("non-positive voltage", i + 1);
        if (!(turns_ratios[i] > 0.0)) throw ConfigError("non-positive turns ratio", i + 1);
        m[i] = turns_ratios[0] * live_voltages[i] / (turns_ratios[i] * live_voltages[0]);
    }
    const auto j = static_cast<std::size_t>(std::min_element(m.begin(), m.end()) - m.begin());
    ZvsSolution s;
    s.lambda = m[j];
    s.min_ratio_port = j;
    s.inner_ratios.reserve(n);
    for (double mi : m) s.inner_ratios.push_back(1.0 - m[j] / mi);
    s.residual_norm = solution_residual(m, s.inner_ratios, s.lambda);
    return s;
}

std::vector<double> sps_duty_ratios(std::size_t ports) {
    if (ports < 2) throw ConfigError("at least 2 ports are required");
    return std::vector<double>(ports, 0.0);
}

}  // namespace mab
