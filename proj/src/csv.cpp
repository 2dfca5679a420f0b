#include "mab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mab::csv {

namespace {

std::string numbered(const std::string& prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out << ',';
        out << cells[c];
    }
    out << '\n';
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no CSV column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
    const auto& cell = rows.at(row).at(column(name));
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw std::invalid_argument("not a number in column " + name + ": " + cell);
    }
    return x;
}

std::string format_number(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_waveforms(std::ostream& out, const WaveformSeries& s) {
    const std::size_t n = s.bridge_voltage.size();
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("v_s", i));
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("i_L", i));
    header.push_back("v_H");
    write_row(out, header);
    for (std::size_t j = 0; j < s.time.size(); ++j) {
        std::vector<std::string> row{format_number(s.time[j])};
        for (std::size_t i = 0; i < n; ++i) row.push_back(format_number(s.bridge_voltage[i][j]));
        for (std::size_t i = 0; i < n; ++i) row.push_back(format_number(s.inductor_current[i][j]));
        row.push_back(format_number(s.link_voltage[j]));
        write_row(out, row);
    }
}

void write_scenario(std::ostream& out, const ScenarioResult& r) {
    const std::size_t n = r.samples.empty() ? 0 : r.samples.front().voltage.size();
    std::vector<std::string> header{"t"};
    for (std::size_t i = 1; i < n; ++i) header.push_back(numbered("V_", i));
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("P_", i));
    for (std::size_t i = 1; i < n; ++i) header.push_back(numbered("d_", i));
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("D_", i));
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("zvs_", i));
    write_row(out, header);
    for (const auto& s : r.samples) {
        std::vector<std::string> row{format_number(s.time)};
        for (std::size_t i = 1; i < n; ++i) row.push_back(format_number(s.voltage[i]));
        for (std::size_t i = 0; i < n; ++i) row.push_back(format_number(s.power[i]));
        for (std::size_t i = 1; i < n; ++i) row.push_back(format_number(s.outer[i]));
        for (std::size_t i = 0; i < n; ++i) row.push_back(format_number(s.inner[i]));
        for (std::size_t i = 0; i < n; ++i) row.emplace_back(to_string(s.zvs[i]));
        write_row(out, row);
    }
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
    const std::size_t n = rows.empty() ? 0 : rows.front().report.ports.size();
    std::vector<std::string> header{"port",      "load_w",    "mode",          "total_rms_a",
                                    "rms_square_sum_a2", "rms_sum_a", "hard_current_a"};
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("i_rms_", i));
    for (std::size_t i = 0; i < n; ++i) header.push_back(numbered("zvs_", i));
    write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> row{std::to_string(r.port + 1),
                                     format_number(r.load),
                                     std::string(to_string(r.mode)),
                                     format_number(r.report.total_rms),
                                     format_number(r.report.rms_square_sum),
                                     format_number(r.report.rms_sum),
                                     format_number(r.report.hard_switching_current)};
        for (const auto& p : r.report.ports) row.push_back(format_number(p.rms_current));
        for (const auto& p : r.report.ports) row.emplace_back(to_string(p.zvs));
        write_row(out, row);
    }
}

Table read(std::istream& in) {
    Table t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (!std::getline(in, line)) return t;
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != t.header.size()) throw std::invalid_argument("ragged CSV row: " + line);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

}  // namespace mab::csv
