// mabsim: command-line front end for the multi-active-bridge simulator.

#include "mab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

namespace {

std::pair<std::size_t, double> parse_load(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--load", "expected PORT:VALUE, got " + text);
    try {
        std::size_t used = 0;
        const auto port = std::stoul(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(text);
        const std::string rest = text.substr(colon + 1);
        const double value = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(text);
        return {port, value};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--load", "expected PORT:VALUE, got " + text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mab::cli;
    CLI::App app{"Multi-active-bridge converter simulator"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string mode;
    std::string out_dir;
    double eps = 0.0;
    std::vector<std::string> loads;
    std::vector<double> outer;
    std::size_t sweep_port = 0, steps = 0, draws = 0;
    double from = 0.0, to = 0.0;

    const std::map<std::string, mab::Modulation> modes{{"sps", mab::Modulation::Sps},
                                                       {"zvs", mab::Modulation::OnlineZvs}};

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", opts.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
        if (needs_config) cfg->required();
        sub->add_option("--mode", mode, "Modulation: sps or zvs")->check(CLI::IsMember({"sps", "zvs"}));
        sub->add_option("--out", out_dir, "Output directory for CSV files");
        sub->add_option("--seed", opts.seed, "Random seed");
        sub->add_option("--eps-current", eps, "ZVS boundary band in amperes")->check(CLI::NonNegativeNumber);
        sub->add_option("--load", loads, "Override a port load, PORT:VALUE (1-based port; W or ohm)");
        sub->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
    };

    auto* steady = app.add_subcommand("steady", "Steady-state operating point and waveforms");
    common(steady, true);
    steady->add_option("--outer", outer, "Explicit outer shifts d_2..d_N instead of the balanced point")
        ->delimiter(',');
    auto* compare = app.add_subcommand("compare", "SPS against online full-ZVS at one operating point");
    common(compare, true);
    auto* dynamic = app.add_subcommand("dynamic", "Closed-loop scenario with load and reference events");
    common(dynamic, true);
    auto* sweep = app.add_subcommand("sweep", "Load sweep of one port in both modes");
    common(sweep, true);
    sweep->add_option("--port", sweep_port, "Swept port (1-based)");
    sweep->add_option("--from", from, "First load value (W)");
    sweep->add_option("--to", to, "Last load value (W)");
    sweep->add_option("--steps", steps, "Number of load points");
    auto* verify = app.add_subcommand("verify", "Randomized oracle and invariant campaign");
    common(verify, false);
    verify->add_option("--draws", draws, "Number of random draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(kValidationError);
    }

    try {
        if (!mode.empty()) opts.mode = modes.at(mode);
        if (!out_dir.empty()) opts.out = out_dir;
        for (const auto& l : loads) opts.loads.push_back(parse_load(l));
        if (!outer.empty()) opts.outer = outer;
        if (sweep->count("--port")) opts.sweep_port = sweep_port;
        if (sweep->count("--from")) opts.sweep_from = from;
        if (sweep->count("--to")) opts.sweep_to = to;
        if (sweep->count("--steps")) opts.sweep_steps = steps;
        if (verify->count("--draws")) opts.draws = draws;
        for (auto* sub : {steady, compare, dynamic, sweep, verify}) {
            if (sub->parsed() && sub->count("--eps-current")) opts.eps_current = eps;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    }

    if (steady->parsed()) return cmd_steady(opts, std::cout, std::cerr);
    if (compare->parsed()) return cmd_compare(opts, std::cout, std::cerr);
    if (dynamic->parsed()) return cmd_dynamic(opts, std::cout, std::cerr);
    if (sweep->parsed()) return cmd_sweep(opts, std::cout, std::cerr);
    return cmd_verify(opts, std::cout, std::cerr);
}
