#include "mab/campaign.hpp"

#include "mab/oracle.hpp"
#include "mab/zvs_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace mab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct DrawResult {
    double oracle = 0.0;
    double instant = 0.0;
    double antisymmetry = 0.0;
    double mean = 0.0;
    double balance = 0.0;
    double weighted = 0.0;
    double online = 0.0;
    double min_offset = 0.0;
};

DrawResult evaluate(const RandomCase& c, double fault) {
    DrawResult r;
    const auto& cfg = c.config;
    const std::size_t n = cfg.size();
    const SteadyStateModel model(cfg, c.shifts);
    const auto& k = model.derived().current_scales;
    const double T = cfg.half_period();

    // Closed form against the event-driven oracle.
    const auto reference = oracle::steady_state_oracle(cfg, c.shifts);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s + 1 < reference.knots.size(); ++s) {
            for (double t : {reference.knots[s], 0.5 * (reference.knots[s] + reference.knots[s + 1])}) {
                const double closed = model.inductor_current(i, t) + fault * k[i];
                r.oracle = std::max(r.oracle, std::abs(closed - reference.at(i, t)) / k[i]);
            }
        }
    }

    // Switching-instant formula against the closed form.
    const auto instant = model.switching_instant_currents();
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = c.shifts.outer[i] * T;
        const double t2 = (c.shifts.outer[i] + c.shifts.inner[i]) * T;
        r.instant = std::max(r.instant, std::abs(instant[i].at_t1 - model.inductor_current(i, t1)) / k[i]);
        r.instant = std::max(r.instant, std::abs(instant[i].at_t2 - model.inductor_current(i, t2)) / k[i]);
    }

    // Half-wave antisymmetry on a fixed grid.
    for (int j = 0; j < 64; ++j) {
        const double t = (j + 0.37) * T / 64.0;
        for (std::size_t i = 0; i < n; ++i) {
            r.antisymmetry = std::max(
                r.antisymmetry, std::abs(model.inductor_current(i, t) + model.inductor_current(i, t + T)) / k[i]);
        }
    }

    // Exact period mean of the closed form.
    auto knots = model.breakpoints();
    knots.push_back(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        double area = 0.0;
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            area += 0.5 * (model.inductor_current(i, knots[s] * T) + model.inductor_current(i, knots[s + 1] * T)) *
                    (knots[s + 1] - knots[s]);
        }
        r.mean = std::max(r.mean, std::abs(area / 2.0) / k[i]);
    }

    const auto report = model.report();
    double magnitude = 0.0;
    for (const auto& p : report.ports) magnitude += std::abs(p.dc_power);
    const double power_scale = cfg.ports[0].dc_voltage * k[0];
    if (magnitude > 1e-6 * power_scale) r.balance = std::abs(report.power_imbalance) / magnitude;

    // Full-ZVS identities.
    const auto& derived = model.derived();
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += derived.coefficients[i] * full_zvs_term(derived, c.shifts.inner, i);
    }
    r.weighted = std::abs(weighted);
    const auto online = online_duty_ratios(cfg.setpoints(), cfg.turns_ratios());
    for (double x : zvs_system_residual(derived, online.inner_ratios)) r.online = std::max(r.online, std::abs(x));
    for (std::size_t i = 0; i < n; ++i) {
        r.online = std::max(r.online, std::abs(full_zvs_term(derived, online.inner_ratios, i)));
    }

    r.min_offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double di = c.shifts.outer[i], dj = c.shifts.outer[j];
            r.min_offset = std::min({r.min_offset, f1(i, j, c.shifts), f2(i, j, c.shifts),
                                     edge_offset(di - dj, c.shifts.inner[j]),
                                     edge_offset(di + c.shifts.inner[i] - dj, c.shifts.inner[j])});
        }
    }
    return r;
}

}  // namespace

std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

RandomCase random_case(std::mt19937_64& rng, std::size_t min_ports, std::size_t max_ports) {
    std::uniform_int_distribution<std::size_t> count(min_ports, max_ports);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };

    RandomCase c;
    const std::size_t n = count(rng);
    c.config.switching_frequency = log_uniform(10e3, 200e3);
    for (std::size_t i = 0; i < n; ++i) {
        PortSpec p;
        p.dc_voltage = log_uniform(50.0, 1000.0);
        p.turns_ratio = log_uniform(0.25, 4.0);
        p.leakage_inductance = log_uniform(2e-6, 100e-6);
        p.dc_capacitance = 500e-6;
        p.load = i == 0 ? LoadModel{LoadKind::VoltageSource, p.dc_voltage} : LoadModel{LoadKind::Resistor, 100.0};
        c.config.ports.push_back(p);
    }
    c.shifts = PhaseShiftSet::zeros(n);
    const bool sps = unit(rng) < 0.2;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) c.shifts.outer[i] = unit(rng) - 0.5;
        if (!sps) c.shifts.inner[i] = 0.98 * unit(rng);
    }
    // Coincident edges are a corner worth hitting regularly.
    if (n > 2 && unit(rng) < 0.15) c.shifts.outer[2] = c.shifts.outer[1];
    return c;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (error) std::rethrow_exception(error);
}

CampaignReport run_campaign(const CampaignOptions& options) {
    if (options.draws < 1) throw ConfigError("campaign needs at least one draw");
    if (options.min_ports < 2 || options.max_ports < options.min_ports) throw ConfigError("invalid port range");
    std::vector<DrawResult> results(options.draws);
    parallel_for(options.draws, options.threads, [&](std::size_t i) {
        auto rng = draw_rng(options.seed, i);
        results[i] = evaluate(random_case(rng, options.min_ports, options.max_ports), options.injected_fault);
    });

    CampaignReport rep;
    rep.draws = options.draws;
    const auto& tol = rep.tolerances;
    for (const auto& r : results) {
        rep.oracle_error = std::max(rep.oracle_error, r.oracle);
        rep.instant_error = std::max(rep.instant_error, r.instant);
        rep.antisymmetry_error = std::max(rep.antisymmetry_error, r.antisymmetry);
        rep.mean_error = std::max(rep.mean_error, r.mean);
        rep.power_balance_error = std::max(rep.power_balance_error, r.balance);
        rep.weighted_term_sum = std::max(rep.weighted_term_sum, r.weighted);
        rep.online_residual = std::max(rep.online_residual, r.online);
        rep.min_offset_term = std::min(rep.min_offset_term, r.min_offset);
        const bool bad = r.oracle > tol.oracle || r.instant > tol.instant || r.antisymmetry > tol.antisymmetry ||
                         r.mean > tol.zero_mean || r.balance > tol.power_balance ||
                         r.weighted > tol.zvs_identity || r.online > tol.zvs_identity || r.min_offset < 0.0;
        if (bad) ++rep.failed_draws;
    }
    return rep;
}

}  // namespace mab
