#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "desync/cli.hpp"

namespace {

void add_family_options(CLI::App* cmd, desync::InteractionSpec& spec)
{
    cmd->add_option("--family", spec.family, "smooth_log or shifted_cubic")
        ->check(CLI::IsMember({"smooth_log", "shifted_cubic"}));
    cmd->add_option("--gain", spec.gain, "smooth_log gain");
    cmd->add_option("--tau", spec.tau, "shifted_cubic delay shift");
    cmd->add_option("--beta", spec.beta, "shifted_cubic gradient at 1/2");
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace desync;

    CLI::App app{"Pulse-coupled oscillator desynchronization toolkit"};
    app.require_subcommand(1);
    bool quiet = false;
    std::optional<std::uint64_t> seed;
    app.add_flag("--quiet", quiet, "suppress non-essential output");
    app.add_option("--seed", seed, "override the random seed");

    std::string config, out = ".", preset;
    auto* simulate = app.add_subcommand("simulate", "run a scenario file");
    simulate->add_option("--config", config, "scenario JSON")->required();
    simulate->add_option("--out", out, "output directory")->required();

    auto* reproduce = app.add_subcommand("reproduce", "run a built-in preset");
    reproduce->add_option("--preset", preset, "fig5a, fig5b, fig5c or fig5d")->required();
    reproduce->add_option("--out", out, "output directory")->required();

    cli::MapArgs map_args;
    auto* map = app.add_subcommand("map", "iterate the phase-difference map");
    map->add_option("--n", map_args.n, "oscillator count")->required();
    map->add_option("--d0", map_args.d0, "initial differences (omit for a random ordered state)")
        ->delimiter(',');
    map->add_option("--steps", map_args.steps, "map steps (N=2) or full cycles (N>=3)");
    map->add_option("--out", map_args.out_dir, "output directory");
    add_family_options(map, map_args.interaction);

    desync::InteractionSpec rho_spec;
    double tolerance = 1e-3;
    auto* rho = app.add_subcommand("rho-c", "critical frequency ratio");
    rho->add_option("--tol", tolerance, "bisection tolerance (>= 1e-6)");
    rho->add_option("--out", out, "output directory");
    add_family_options(rho, rho_spec);

    desync::InteractionSpec orbit_spec;
    std::size_t n = 3, samples = 500;
    auto* orbits = app.add_subcommand("orbits", "count attracting orbit classes");
    orbits->add_option("--n", n, "oscillator count (2..8)")->required();
    orbits->add_option("--samples", samples, "random initial conditions (>= 100)");
    add_family_options(orbits, orbit_spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_validation;
    }

    cli::Context ctx{std::cout, std::cerr, quiet};
    if (*simulate)
        return cli::cmd_simulate(config, out, seed, ctx);
    if (*reproduce)
        return cli::cmd_reproduce(preset, out, seed, ctx);
    if (*map) {
        if (seed)
            map_args.seed = *seed;
        return cli::cmd_map(map_args, ctx);
    }
    if (*rho)
        return cli::cmd_rho_c(rho_spec, tolerance, out, ctx);
    return cli::cmd_orbits(n, samples, seed.value_or(42), orbit_spec, ctx);
}
