#pragma once

// Command implementations behind the `desync` executable. Each command
// reports errors on `err` and returns the process exit status:
// 0 success, 2 validation/argument error, 3 solver or convergence error,
// 4 resource limit.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "desync/analysis.hpp"
#include "desync/error.hpp"
#include "desync/interaction.hpp"
#include "desync/io.hpp"
#include "desync/phasemap.hpp"
#include "desync/scenario.hpp"

namespace desync::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_validation = 2,
    exit_solver = 3,
    exit_resource = 4,
};

inline int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::constraint_violation:
    case ErrorKind::ordering_violation:
    case ErrorKind::validation: return exit_validation;
    case ErrorKind::solver: return exit_solver;
    case ErrorKind::resource_limit: return exit_resource;
    case ErrorKind::internal: return exit_internal;
    }
    return exit_internal;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool quiet = false;
};

template <class Body>
int guarded(Context& ctx, Body&& body)
{
    try {
        body();
        return exit_ok;
    } catch (const Error& e) {
        ctx.err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        ctx.err << "error: " << e.what() << "\n";
        return exit_internal;
    }
}

inline std::string format_order(const std::vector<std::size_t>& order)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < order.size(); ++i)
        os << (i ? " " : "") << order[i];
    return os.str();
}

inline std::string format_state(const DifferenceState& d, int digits = 10)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << "(";
    for (std::size_t i = 0; i < d.size(); ++i)
        os << (i ? ", " : "") << d[i];
    os << ")";
    return os.str();
}

inline void write_simulation(const SimulationResult& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorKind::validation, "cannot create output directory '" + dir.string() + "'");
    io::write_file(dir / "snapshots.csv", [&](std::ostream& os) { io::write_snapshots(os, r.trace); });
    io::write_file(dir / "events.csv", [&](std::ostream& os) { io::write_events(os, r.trace); });
    io::write_file(dir / "order_parameter.csv",
                   [&](std::ostream& os) { io::write_order_parameter(os, r.order); });
    io::write_file(dir / "verdict.csv", [&](std::ostream& os) { io::write_verdict(os, r.verdict); });
    io::write_file(dir / "limit_cycle.txt",
                   [&](std::ostream& os) { io::write_limit_cycle(os, r.limit_cycle); });
}

inline std::string summary_line(const SimulationResult& r)
{
    std::ostringstream os;
    std::size_t good = 0;
    for (const auto& e : r.verdict.edges)
        good += e.desynchronized;
    os << r.scenario.name << ": final P " << io::num(r.order.back().value) << ", window mean P "
       << io::num(r.window_mean_order) << ", period ";
    if (r.limit_cycle)
        os << io::num(r.limit_cycle->period);
    else
        os << "none";
    os << ", firing order ";
    if (r.verdict.converged)
        os << format_order(r.verdict.firing_order);
    else
        os << "not constant";
    os << ", desynchronized edges " << good << "/" << r.verdict.edges.size();
    return os.str();
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed, Context ctx)
{
    return guarded(ctx, [&] {
        auto config = load_scenario(config_path);
        if (seed)
            config.seed = *seed;
        auto result = simulate(build_scenario(config));
        write_simulation(result, out_dir);
        if (!ctx.quiet)
            ctx.out << summary_line(result) << "\n";
    });
}

inline int cmd_reproduce(const std::string& preset, const std::string& out_dir,
                         std::optional<std::uint64_t> seed, Context ctx)
{
    return guarded(ctx, [&] {
        auto config = preset_config(preset);
        if (seed)
            config.seed = *seed;
        auto result = simulate(build_scenario(config));
        write_simulation(result, out_dir);
        io::write_file(std::filesystem::path(out_dir) / "scenario.json",
                       [&](std::ostream& os) { os << to_json(config).dump(2) << "\n"; });
        ctx.out << summary_line(result) << "\n";
    });
}

struct MapArgs {
    std::size_t n = 2;
    InteractionSpec interaction;
    std::vector<double> d0;  // empty: random ordered state for N >= 3, 0.1 for N = 2
    std::size_t steps = 200;
    std::uint64_t seed = 42;
    std::string out_dir = ".";
};

inline int cmd_map(const MapArgs& args, Context ctx)
{
    return guarded(ctx, [&] {
        if (args.n < 2)
            fail(ErrorKind::invalid_argument, "N must be at least 2");
        auto f = args.interaction.build();
        std::filesystem::create_directories(args.out_dir);
        const auto path = std::filesystem::path(args.out_dir) / "map_trajectory.csv";

        if (args.n == 2) {
            if (args.d0.size() > 1)
                fail(ErrorKind::invalid_argument, "N = 2 takes a single d0");
            double d0 = args.d0.empty() ? 0.1 : args.d0.front();
            auto traj = iterate_return_map(d0, args.steps, f);
            std::vector<DifferenceState> rows;
            for (double v : traj.values)
                rows.push_back({v});
            io::write_file(path, [&](std::ostream& os) { io::write_map_trajectory(os, rows); });
            if (d0 == 0.0)
                ctx.out << "unstable fixed point, no motion\n";
            else if (traj.converged_at)
                ctx.out << "converged to ±0.5 after " << *traj.converged_at << " steps\n";
            else
                ctx.out << "no convergence after " << args.steps << " steps\n";
            return;
        }

        DifferenceState d0;
        if (args.d0.empty()) {
            RandomStream rng(args.seed, "map");
            d0 = random_ordered_state(args.n, rng).second;
        } else {
            if (args.d0.size() + 1 != args.n)
                fail(ErrorKind::invalid_argument,
                     "d0 needs " + std::to_string(args.n - 1) + " components");
            d0 = args.d0;
        }
        auto traj = iterate_full_cycle(d0, args.steps, f);
        io::write_file(path, [&](std::ostream& os) { io::write_map_trajectory(os, traj.states); });
        if (traj.converged_at)
            ctx.out << "converged to fixed point d* = " << format_state(traj.states.back())
                    << " after " << *traj.converged_at << " cycles\n";
        else
            ctx.out << "no convergence after " << args.steps << " cycles\n";
    });
}

inline constexpr double rho_c_min_tolerance = 1e-6;

inline int cmd_rho_c(const InteractionSpec& spec, double tolerance, const std::string& out_dir,
                     Context ctx)
{
    return guarded(ctx, [&] {
        if (!(tolerance >= rho_c_min_tolerance))
            fail(ErrorKind::invalid_argument, "tolerance must be at least 1e-6");
        auto f = spec.build();
        auto result = critical_ratio(f, tolerance);

        // bisection probes plus a uniform grid over [1, 2 rho_c - 1]
        auto probes = result.probes;
        const std::size_t grid = 40;
        for (std::size_t i = 0; i <= grid; ++i) {
            double rho = 1.0 + 2.0 * (result.rho_c - 1.0) * static_cast<double>(i) / grid;
            LimitCycleProbe p;
            try {
                p = limit_cycle_phase(f, rho);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::solver)
                    throw;
                p.rho = rho;
                p.solver_failed = true;
            }
            probes.push_back(p);
        }
        std::stable_sort(probes.begin(), probes.end(),
                         [](const auto& a, const auto& b) { return a.rho < b.rho; });

        std::filesystem::create_directories(out_dir);
        io::write_file(std::filesystem::path(out_dir) / "rho_sweep.csv",
                       [&](std::ostream& os) { io::write_rho_sweep(os, probes); });
        std::size_t failures = 0;
        for (const auto& p : probes)
            failures += p.solver_failed;
        ctx.out << "rho_c = " << std::fixed << std::setprecision(6) << result.rho_c << " for "
                << f.describe() << "\n";
        if (failures)
            ctx.out << failures << " rho samples did not converge (see rho_sweep.csv)\n";
    });
}

inline int cmd_orbits(std::size_t n, std::size_t samples, std::uint64_t seed,
                      const InteractionSpec& spec, Context ctx)
{
    return guarded(ctx, [&] {
        auto f = spec.build();
        auto census = enumerate_attractors(n, samples, seed, f);
        ctx.out << "found " << census.orbits.size() << ", expected " << count_orbit_classes(n)
                << "\n";
        ctx.out << "converged " << census.converged << "/" << census.samples << " samples\n";
        if (!census.non_convergent.empty())
            ctx.out << census.non_convergent.size() << " samples did not converge\n";
        if (ctx.quiet)
            return;
        for (const auto& o : census.orbits) {
            double lead = o.multipliers.empty() ? 0.0 : o.multipliers.front();
            ctx.out << "order " << format_order(o.firing_order) << "  d* = "
                    << format_state(o.fixed_point) << "  samples " << o.samples
                    << "  max|multiplier| " << io::num(lead) << "\n";
        }
    });
}

}  // namespace desync::cli
