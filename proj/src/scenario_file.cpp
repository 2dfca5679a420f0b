#include "mab/scenario_file.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
}

void allow_only(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) fail(path, "unknown key '" + key + "'");
    }
}

double number(const json& obj, const std::string& path, const char* key) {
    const std::string where = path + "." + key;
    if (!obj.contains(key)) fail(where, "missing required number");
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "expected a finite number");
    return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, path, key) : fallback;
}

std::size_t count(const json& obj, const std::string& path, const char* key) {
    const std::string where = path + "." + key;
    if (!obj.contains(key)) fail(where, "missing required integer");
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::size_t count_or(const json& obj, const std::string& path, const char* key, std::size_t fallback) {
    return obj.contains(key) ? count(obj, path, key) : fallback;
}

std::size_t port_index(const json& obj, const std::string& path, std::size_t ports) {
    const std::size_t p = count(obj, path, "port");
    if (p < 1 || p > ports) fail(path + ".port", "port must be in 1.." + std::to_string(ports));
    return p - 1;
}

Modulation parse_mode(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected \"sps\" or \"zvs\"");
    const auto s = v.get<std::string>();
    if (s == "sps") return Modulation::Sps;
    if (s == "zvs") return Modulation::OnlineZvs;
    fail(path, "expected \"sps\" or \"zvs\", got \"" + s + "\"");
}

LoadModel parse_load(const json& obj, const std::string& path) {
    allow_only(obj, path, {"kind", "value"});
    if (!obj.contains("kind") || !obj.at("kind").is_string()) fail(path + ".kind", "expected a string");
    const auto kind = obj.at("kind").get<std::string>();
    LoadModel load;
    if (kind == "voltage_source") load.kind = LoadKind::VoltageSource;
    else if (kind == "resistor") load.kind = LoadKind::Resistor;
    else if (kind == "constant_power") load.kind = LoadKind::ConstantPower;
    else fail(path + ".kind", "unknown load kind \"" + kind + "\"");
    load.value = number_or(obj, path, "value", 0.0);
    return load;
}

ConverterConfig parse_converter(const json& obj, const std::string& path) {
    allow_only(obj, path, {"switching_frequency_hz", "ports"});
    ConverterConfig cfg;
    cfg.switching_frequency = number(obj, path, "switching_frequency_hz");
    if (!obj.contains("ports") || !obj.at("ports").is_array()) fail(path + ".ports", "expected an array");
    const auto& ports = obj.at("ports");
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const std::string where = path + ".ports[" + std::to_string(i) + "]";
        const auto& p = ports[i];
        allow_only(p, where,
                   {"dc_voltage_v", "turns_ratio", "leakage_inductance_h", "dc_capacitance_f", "load"});
        PortSpec spec;
        spec.dc_voltage = number(p, where, "dc_voltage_v");
        spec.turns_ratio = number(p, where, "turns_ratio");
        spec.leakage_inductance = number(p, where, "leakage_inductance_h");
        spec.dc_capacitance = number_or(p, where, "dc_capacitance_f", 0.0);
        if (p.contains("load")) {
            spec.load = parse_load(p.at("load"), where + ".load");
        } else if (i == 0) {
            spec.load = {LoadKind::VoltageSource, spec.dc_voltage};
        } else {
            fail(where + ".load", "non-reference ports need a load");
        }
        cfg.ports.push_back(spec);
    }
    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        std::string where = path;
        if (e.port() > 0) where += ".ports[" + std::to_string(e.port() - 1) + "]";
        throw ScenarioError(where + ": " + e.what(), e.port());
    }
    return cfg;
}

void parse_control(const json& obj, const std::string& path, ScenarioFile& out) {
    allow_only(obj, path, {"mode", "control_period_cycles", "settling_band", "controllers"});
    if (obj.contains("mode")) out.mode = parse_mode(obj.at("mode"), path + ".mode");
    out.simulation.control_period_cycles = count_or(obj, path, "control_period_cycles", 1);
    if (out.simulation.control_period_cycles < 1) fail(path + ".control_period_cycles", "must be >= 1");
    out.simulation.settling_band = number_or(obj, path, "settling_band", 0.02);
    if (!(out.simulation.settling_band > 0.0)) fail(path + ".settling_band", "must be positive");
    if (!obj.contains("controllers")) return;
    const auto& list = obj.at("controllers");
    if (!list.is_array()) fail(path + ".controllers", "expected an array");
    const std::size_t n = out.converter.size();
    std::vector<PiController> parsed;
    for (std::size_t c = 0; c < list.size(); ++c) {
        const std::string where = path + ".controllers[" + std::to_string(c) + "]";
        allow_only(list[c], where, {"port", "kp", "ki", "reference_v"});
        PiController pi;
        pi.port = port_index(list[c], where, n);
        if (pi.port == 0) fail(where + ".port", "the reference port is not controlled");
        pi.kp = number(list[c], where, "kp");
        pi.ki = number(list[c], where, "ki");
        pi.reference = number_or(list[c], where, "reference_v", out.converter.ports[pi.port].dc_voltage);
        if (!(pi.reference > 0.0)) fail(where + ".reference_v", "must be positive");
        for (const auto& existing : parsed) {
            if (existing.port == pi.port) fail(where + ".port", "duplicate controller");
        }
        parsed.push_back(pi);
    }
    // Non-reference ports without an explicit controller get the defaults.
    for (std::size_t p = 1; p < n; ++p) {
        const bool has = std::any_of(parsed.begin(), parsed.end(), [&](const auto& c) { return c.port == p; });
        if (!has) {
            auto d = default_controllers(out.converter);
            parsed.push_back(d[p - 1]);
        }
    }
    std::sort(parsed.begin(), parsed.end(), [](const auto& a, const auto& b) { return a.port < b.port; });
    out.controllers = std::move(parsed);
}

void parse_events(const json& list, const std::string& path, ScenarioFile& out) {
    if (!list.is_array()) fail(path, "expected an array");
    double last = 0.0;
    for (std::size_t e = 0; e < list.size(); ++e) {
        const std::string where = path + "[" + std::to_string(e) + "]";
        allow_only(list[e], where, {"time_s", "port", "load", "reference_v"});
        ScenarioEvent ev;
        ev.time = number(list[e], where, "time_s");
        if (ev.time < 0.0) fail(where + ".time_s", "must be non-negative");
        if (ev.time < last) fail(where + ".time_s", "event times must be non-decreasing");
        last = ev.time;
        ev.port = port_index(list[e], where, out.converter.size());
        if (list[e].contains("load")) ev.load = number(list[e], where, "load");
        if (list[e].contains("reference_v")) ev.reference = number(list[e], where, "reference_v");
        if (ev.load.has_value() == ev.reference.has_value()) {
            fail(where, "give exactly one of \"load\" or \"reference_v\"");
        }
        if (ev.load) {
            const auto kind = out.converter.ports[ev.port].load.kind;
            if (kind == LoadKind::VoltageSource) fail(where + ".port", "cannot change the load of a source");
            if (*ev.load < 0.0 || (kind == LoadKind::Resistor && *ev.load == 0.0)) {
                fail(where + ".load", "invalid load value");
            }
        }
        if (ev.reference && !(*ev.reference > 0.0)) fail(where + ".reference_v", "must be positive");
        out.events.push_back(ev);
    }
}

void parse_analysis(const json& obj, const std::string& path, ScenarioFile& out) {
    allow_only(obj, path, {"eps_current_a", "duration_s", "points_per_period", "periods", "sweep", "verify_draws"});
    out.simulation.eps_current = number_or(obj, path, "eps_current_a", 0.0);
    if (out.simulation.eps_current < 0.0) fail(path + ".eps_current_a", "must be non-negative");
    out.simulation.duration = number_or(obj, path, "duration_s", out.simulation.duration);
    if (!(out.simulation.duration > 0.0)) fail(path + ".duration_s", "must be positive");
    out.points_per_period = count_or(obj, path, "points_per_period", out.points_per_period);
    if (out.points_per_period < 2) fail(path + ".points_per_period", "must be >= 2");
    out.periods = count_or(obj, path, "periods", out.periods);
    if (out.periods < 1) fail(path + ".periods", "must be >= 1");
    out.verify_draws = count_or(obj, path, "verify_draws", out.verify_draws);
    if (out.verify_draws < 1) fail(path + ".verify_draws", "must be >= 1");
    if (obj.contains("sweep")) {
        const auto& s = obj.at("sweep");
        const std::string where = path + ".sweep";
        allow_only(s, where, {"port", "from_w", "to_w", "steps"});
        SweepSpec spec;
        spec.port = port_index(s, where, out.converter.size());
        if (out.converter.ports[spec.port].load.kind == LoadKind::VoltageSource) {
            fail(where + ".port", "cannot sweep the source port");
        }
        spec.from = number(s, where, "from_w");
        spec.to = number(s, where, "to_w");
        spec.steps = count(s, where, "steps");
        if (!(spec.from > 0.0) || !(spec.to > 0.0)) fail(where, "power range must be positive");
        if (spec.steps < 1) fail(where + ".steps", "must be >= 1");
        out.sweep = spec;
    }
}

std::string line_context(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

std::vector<double> SweepSpec::points() const {
    if (steps == 1) return {from};
    std::vector<double> out(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        out[k] = from + (to - from) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }
    return out;
}

ScenarioFile parse_scenario(std::string_view text, std::string_view origin) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string(origin) + ":" + line_context(text, e.byte > 0 ? e.byte - 1 : 0) +
                            ": syntax error: " + e.what());
    }
    try {
        allow_only(root, "$", {"converter", "control", "events", "analysis", "output"});
        ScenarioFile out;
        out.simulation.duration = 0.01;
        if (!root.contains("converter")) fail("$.converter", "missing required section");
        out.converter = parse_converter(root.at("converter"), "$.converter");
        out.controllers = default_controllers(out.converter);
        if (root.contains("control")) parse_control(root.at("control"), "$.control", out);
        if (root.contains("events")) parse_events(root.at("events"), "$.events", out);
        if (root.contains("analysis")) parse_analysis(root.at("analysis"), "$.analysis", out);
        if (root.contains("output")) {
            const auto& o = root.at("output");
            allow_only(o, "$.output", {"dir"});
            if (o.contains("dir")) {
                if (!o.at("dir").is_string()) fail("$.output.dir", "expected a string");
                out.output_dir = o.at("dir").get<std::string>();
            }
        }
        out.simulation.mode = out.mode;
        return out;
    } catch (const ScenarioError& e) {
        throw ScenarioError(std::string(origin) + ": " + e.what(), e.port());
    }
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

}  // namespace mab
