#include "mab/commands.hpp"

#include "mab/campaign.hpp"
#include "mab/csv.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mab::cli {

namespace {

ScenarioFile load(const CommandOptions& opts) {
    auto s = load_scenario(opts.config);
    if (opts.mode) {
        s.mode = *opts.mode;
        s.simulation.mode = *opts.mode;
    }
    if (opts.eps_current) {
        if (*opts.eps_current < 0.0) throw ConfigError("--eps-current must be non-negative");
        s.simulation.eps_current = *opts.eps_current;
    }
    apply_loads(s, opts.loads);
    return s;
}

std::filesystem::path output_dir(const CommandOptions& opts, const ScenarioFile& s) {
    return opts.out ? *opts.out : std::filesystem::path(s.output_dir);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

// Runs a command body and maps exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const VoltageCollapse& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

void print_report(std::ostream& out, const SteadyStateReport& r) {
    out << std::fixed;
    out << " port        V        d        D   i(t1) A   i(t2) A  status     I_rms A        P W\n";
    for (std::size_t i = 0; i < r.ports.size(); ++i) {
        const auto& p = r.ports[i];
        out << std::setw(5) << i + 1 << std::setprecision(2) << std::setw(9) << r.voltages[i]
            << std::setprecision(4) << std::setw(9) << r.shifts.outer[i] << std::setw(9) << r.shifts.inner[i]
            << std::setprecision(3) << std::setw(10) << p.instant.at_t1 << std::setw(10) << p.instant.at_t2
            << "  " << std::left << std::setw(9) << to_string(p.zvs) << std::right << std::setw(10)
            << p.rms_current << std::setprecision(1) << std::setw(11) << p.dc_power << '\n';
    }
    out << std::setprecision(3) << "total rms " << r.total_rms << " A (sum of squares " << r.rms_square_sum
        << " A^2, plain sum " << r.rms_sum << " A), hard-switching current " << r.hard_switching_current
        << " A, power imbalance " << std::setprecision(6) << r.power_imbalance << " W\n";
    out.unsetf(std::ios::floatfield);
}

}  // namespace

void apply_loads(ScenarioFile& s, const std::vector<std::pair<std::size_t, double>>& loads) {
    for (const auto& [port, value] : loads) {
        if (port < 2 || port > s.converter.size()) {
            throw ConfigError("--load port must be in 2.." + std::to_string(s.converter.size()));
        }
        auto& load = s.converter.ports[port - 1].load;
        if (value < 0.0 || (load.kind == LoadKind::Resistor && value == 0.0)) {
            throw ConfigError("invalid load value", port);
        }
        load.value = value;
    }
}

SteadyStateReport operating_point(const ScenarioFile& s, Modulation mode) {
    const auto v = s.converter.setpoints();
    const auto inner = inner_ratios_for(mode, v, s.converter.turns_ratios());
    const auto shifts = solve_outer_shifts(s.converter, inner, v);
    return SteadyStateModel(s.converter, shifts, v).report(s.simulation.eps_current);
}

double Comparison::rms_ratio() const { return zvs.rms_square_sum / sps.rms_square_sum; }

double Comparison::rms_sum_ratio() const { return zvs.rms_sum / sps.rms_sum; }

Comparison compare_modes(const ScenarioFile& s) {
    return {operating_point(s, Modulation::Sps), operating_point(s, Modulation::OnlineZvs)};
}

std::vector<csv::SweepRow> sweep_rows(const ScenarioFile& s, const SweepSpec& spec, unsigned threads) {
    const auto points = spec.points();
    std::vector<csv::SweepRow> rows(2 * points.size());
    parallel_for(rows.size(), threads, [&](std::size_t r) {
        ScenarioFile local = s;
        local.converter.ports[spec.port].load.value = points[r / 2];
        const Modulation mode = r % 2 == 0 ? Modulation::Sps : Modulation::OnlineZvs;
        rows[r] = {spec.port, points[r / 2], mode, operating_point(local, mode)};
    });
    return rows;
}

int cmd_steady(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = load(opts);
        const auto v = s.converter.setpoints();
        const auto inner = inner_ratios_for(s.mode, v, s.converter.turns_ratios());
        PhaseShiftSet shifts;
        if (opts.outer) {
            if (opts.outer->size() + 1 != s.converter.size()) {
                throw ConfigError("--outer needs one value per non-reference port");
            }
            shifts.outer = {0.0};
            shifts.outer.insert(shifts.outer.end(), opts.outer->begin(), opts.outer->end());
            shifts.inner = inner;
        } else {
            shifts = solve_outer_shifts(s.converter, inner, v);
        }
        const SteadyStateModel model(s.converter, shifts, v);
        const auto report = model.report(s.simulation.eps_current);
        std::string csv_text;
        if (opts.out) {
            std::ostringstream buf;
            csv::write_waveforms(buf, model.sample(s.points_per_period, s.periods));
            csv_text = buf.str();
        }
        out << "mode " << to_string(s.mode) << '\n';
        print_report(out, report);
        if (opts.out) {
            const auto path = *opts.out / "waveforms.csv";
            write_file(path, csv_text);
            out << "wrote " << path.string() << '\n';
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = load(opts);
        const auto c = compare_modes(s);
        out << "SPS\n";
        print_report(out, c.sps);
        out << "ONLINE_ZVS\n";
        print_report(out, c.zvs);
        out << std::setprecision(4) << "rms ratio (sum I^2, zvs/sps) " << c.rms_ratio()
            << "\nrms ratio (sum I, zvs/sps) " << c.rms_sum_ratio() << '\n';
        if (opts.out) {
            std::vector<csv::SweepRow> rows;
            for (std::size_t i = 1; i < s.converter.size(); ++i) {
                if (s.converter.ports[i].load.kind == LoadKind::ConstantPower) {
                    rows.push_back({i, s.converter.ports[i].load.value, Modulation::Sps, c.sps});
                    rows.push_back({i, s.converter.ports[i].load.value, Modulation::OnlineZvs, c.zvs});
                    break;
                }
            }
            if (rows.empty()) {
                rows.push_back({1, s.converter.ports[1].load.value, Modulation::Sps, c.sps});
                rows.push_back({1, s.converter.ports[1].load.value, Modulation::OnlineZvs, c.zvs});
            }
            std::ostringstream buf;
            csv::write_sweep(buf, rows);
            write_file(*opts.out / "compare.csv", buf.str());
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_dynamic(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = load(opts);
        const auto result = run_scenario(s.converter, s.controllers, s.events, s.simulation);
        out << "mode " << to_string(s.mode) << ", " << result.samples.size() << " control periods\n";
        if (result.events.empty()) out << "no events\n";
        for (const auto& e : result.events) {
            out << "event t=" << e.event.time << " s port " << e.event.port + 1
                << (e.event.load ? " load -> " : " reference -> ")
                << (e.event.load ? *e.event.load : *e.event.reference) << ": ";
            if (e.settling_time) {
                out << "settled in " << *e.settling_time * 1e3 << " ms";
            } else {
                out << "unsettled";
            }
            out << " (final " << e.final_value << ")\n";
        }
        for (std::size_t c = 0; c < result.regulated_ports.size(); ++c) {
            out << "port " << result.regulated_ports[c] + 1 << ": max deviation "
                << result.max_deviation[c] * 100.0 << " %, final error " << result.steady_state_error[c]
                << " V\n";
        }
        const auto dir = output_dir(opts, s);
        std::ostringstream buf;
        csv::write_scenario(buf, result);
        write_file(dir / "scenario.csv", buf.str());
        out << "wrote " << (dir / "scenario.csv").string() << '\n';
        return static_cast<int>(kSuccess);
    });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = load(opts);
        SweepSpec spec = s.sweep.value_or(SweepSpec{});
        if (opts.sweep_port) {
            if (*opts.sweep_port < 2 || *opts.sweep_port > s.converter.size()) {
                throw ConfigError("--port must be a non-reference port");
            }
            spec.port = *opts.sweep_port - 1;
        }
        if (opts.sweep_from) spec.from = *opts.sweep_from;
        if (opts.sweep_to) spec.to = *opts.sweep_to;
        if (opts.sweep_steps) spec.steps = *opts.sweep_steps;
        if (spec.port == 0 || spec.port >= s.converter.size()) throw ConfigError("sweep port out of range");
        if (!(spec.from > 0.0) || !(spec.to > 0.0)) throw ConfigError("sweep range must be positive");
        if (spec.steps < 1) throw ConfigError("sweep needs at least one step");

        const auto rows = sweep_rows(s, spec, opts.threads);
        out << " load W  mode  total_rms A  sum I^2 A^2  hard A\n" << std::fixed;
        for (const auto& r : rows) {
            out << std::setprecision(1) << std::setw(7) << r.load << "  " << std::setw(4) << to_string(r.mode)
                << std::setprecision(3) << std::setw(13) << r.report.total_rms << std::setw(13)
                << r.report.rms_square_sum << std::setw(8) << r.report.hard_switching_current << '\n';
        }
        out.unsetf(std::ios::floatfield);
        const auto dir = output_dir(opts, s);
        std::ostringstream buf;
        csv::write_sweep(buf, rows);
        write_file(dir / "sweep.csv", buf.str());
        out << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
        return static_cast<int>(kSuccess);
    });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        CampaignOptions co;
        co.seed = opts.seed;
        co.draws = 1000;
        if (!opts.config.empty()) co.draws = load(opts).verify_draws;
        if (opts.draws) co.draws = *opts.draws;
        if (co.draws < 1) throw ConfigError("--draws must be at least 1");
        co.threads = opts.threads;
        co.injected_fault = opts.injected_fault;
        const auto rep = run_campaign(co);
        const auto& tol = rep.tolerances;
        out << std::scientific << std::setprecision(3);
        out << "draws " << rep.draws << " seed " << co.seed << '\n';
        out << "closed form vs oracle   " << rep.oracle_error << " (tol " << tol.oracle << ")\n";
        out << "switching instants      " << rep.instant_error << " (tol " << tol.instant << ")\n";
        out << "half-wave antisymmetry  " << rep.antisymmetry_error << " (tol " << tol.antisymmetry << ")\n";
        out << "zero mean               " << rep.mean_error << " (tol " << tol.zero_mean << ")\n";
        out << "power balance           " << rep.power_balance_error << " (tol " << tol.power_balance << ")\n";
        out << "sum l_i T_i             " << rep.weighted_term_sum << " (tol " << tol.zvs_identity << ")\n";
        out << "online rule residual    " << rep.online_residual << " (tol " << tol.zvs_identity << ")\n";
        out << "min offset term         " << rep.min_offset_term << " (must be >= 0)\n";
        out.unsetf(std::ios::floatfield);
        out << (rep.passed() ? "PASS" : "FAIL") << " (" << rep.failed_draws << " failing draws)\n";
        return static_cast<int>(rep.passed() ? kSuccess : kVerificationFailure);
    });
}

}  // namespace mab::cli
