#pragma once

// CSV and text writers. Numbers use 12 significant digits so outputs are
// byte-stable across runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "desync/analysis.hpp"
#include "desync/engine.hpp"
#include "desync/error.hpp"
#include "desync/phasemap.hpp"

namespace desync::io {

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_snapshots(std::ostream& os, const EventTrace& trace)
{
    os << "t";
    for (std::size_t i = 1; i <= trace.oscillators; ++i)
        os << ",x_" << i;
    os << "\n";
    for (std::size_t r = 0; r < trace.snapshot_count(); ++r) {
        os << num(trace.snapshot_times[r]);
        for (double x : trace.snapshot(r))
            os << "," << num(x);
        os << "\n";
    }
}

inline void write_events(std::ostream& os, const EventTrace& trace)
{
    os << "t,id,kind\n";
    for (const auto& e : trace.events)
        os << num(e.time) << "," << e.oscillator << "," << to_string(e.kind) << "\n";
}

inline void write_order_parameter(std::ostream& os, const OrderParameterSeries& series)
{
    os << "t,P\n";
    for (const auto& s : series)
        os << num(s.time) << "," << num(s.value) << "\n";
}

inline void write_verdict(std::ostream& os, const DesyncVerdict& verdict)
{
    os << "edge,distance,alternating,desynchronized\n";
    for (const auto& e : verdict.edges)
        os << e.a << "-" << e.b << "," << num(e.distance) << "," << (e.alternating ? 1 : 0) << ","
           << (e.desynchronized ? 1 : 0) << "\n";
}

inline void write_limit_cycle(std::ostream& os, const std::optional<LimitCycle>& lc)
{
    if (!lc) {
        os << "none\n";
        return;
    }
    os << "period " << num(lc->period) << "\norder";
    for (auto id : lc->order)
        os << " " << id;
    os << "\n";
}

/// Rows (cycle_index, d_1, ..., d_{N-1}).
inline void write_map_trajectory(std::ostream& os, const std::vector<DifferenceState>& states)
{
    os << "cycle_index";
    const std::size_t m = states.empty() ? 0 : states.front().size();
    for (std::size_t k = 1; k <= m; ++k)
        os << ",d_" << k;
    os << "\n";
    for (std::size_t c = 0; c < states.size(); ++c) {
        os << c;
        for (double v : states[c])
            os << "," << num(v);
        os << "\n";
    }
}

inline void write_rho_sweep(std::ostream& os, const std::vector<LimitCycleProbe>& probes)
{
    os << "rho,x_star,alternating\n";
    for (const auto& p : probes) {
        os << num(p.rho) << ",";
        if (p.solver_failed)
            os << "nan,solver_failed\n";
        else
            os << num(p.x_star) << "," << (p.alternating ? 1 : 0) << "\n";
    }
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::validation, "cannot write '" + path.string() + "'");
    writer(out);
    if (!out)
        fail(ErrorKind::validation, "error writing '" + path.string() + "'");
}

}  // namespace desync::io
