#pragma once

// CSV exports. Every file has a header row and SI units (s, V, A, W);
// port numbers in headers are 1-based.
//
//   waveforms: t, v_s1..v_sN, i_L1..i_LN, v_H
//   scenario:  t, V_2..V_N, P_1..P_N, d_2..d_N, D_1..D_N, zvs_1..zvs_N
//   sweep:     port, load_w, mode, total_rms_a, rms_square_sum_a2, rms_sum_a,
//              hard_current_a, i_rms_1..i_rms_N, zvs_1..zvs_N

#include "mab/control_sim.hpp"
#include "mab/waveform.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mab::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

/// Shortest text that parses back to the same double.
std::string format_number(double x);

void write_waveforms(std::ostream& out, const WaveformSeries& series);
void write_scenario(std::ostream& out, const ScenarioResult& result);

struct SweepRow {
    std::size_t port = 0;  // 0-based
    double load = 0.0;
    Modulation mode = Modulation::Sps;
    SteadyStateReport report;
};

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

Table read(std::istream& in);

}  // namespace mab::csv
