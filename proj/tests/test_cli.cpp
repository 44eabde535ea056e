#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "desync/cli.hpp"

using namespace desync;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("desync_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

struct Captured {
    std::ostringstream out, err;
    cli::Context ctx() { return {out, err, false}; }
};

fs::path write_config(const fs::path& dir, const std::string& body)
{
    auto p = dir / "config.json";
    std::ofstream(p) << body;
    return p;
}

const char* five_config = R"({
  "schema": 1, "name": "five", "seed": 42,
  "oscillators": {"count": 5, "frequencies": [1, 1, 1, 1, 1]},
  "topology": {"kind": "complete"},
  "interaction": {"family": "smooth_log", "gain": 2},
  "duration": 100, "sample_interval": 0.05
})";

}  // namespace

TEST(Cli, SimulateWritesOutputs)
{
    auto dir = scratch("simulate");
    auto cfg = write_config(dir, five_config);
    Captured c;
    EXPECT_EQ(cli::cmd_simulate(cfg.string(), (dir / "out").string(), std::nullopt, c.ctx()), 0)
        << c.err.str();
    EXPECT_EQ(first_line(dir / "out" / "snapshots.csv"), "t,x_1,x_2,x_3,x_4,x_5");
    EXPECT_EQ(first_line(dir / "out" / "events.csv"), "t,id,kind");
    EXPECT_EQ(first_line(dir / "out" / "order_parameter.csv"), "t,P");
    EXPECT_EQ(first_line(dir / "out" / "verdict.csv"), "edge,distance,alternating,desynchronized");
    EXPECT_TRUE(fs::exists(dir / "out" / "limit_cycle.txt"));
    EXPECT_NE(c.out.str().find("five: final P"), std::string::npos);
}

TEST(Cli, SimulateIsByteIdentical)
{
    auto dir = scratch("rerun");
    auto cfg = write_config(dir, five_config);
    Captured c;
    ASSERT_EQ(cli::cmd_simulate(cfg.string(), (dir / "a").string(), std::nullopt, c.ctx()), 0);
    ASSERT_EQ(cli::cmd_simulate(cfg.string(), (dir / "b").string(), std::nullopt, c.ctx()), 0);
    for (auto name : {"snapshots.csv", "events.csv", "order_parameter.csv", "verdict.csv", "limit_cycle.txt"})
        EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
}

TEST(Cli, ValidationErrorsExitWithTwo)
{
    auto dir = scratch("invalid");
    std::string body = five_config;
    body.replace(body.find("[1, 1, 1, 1, 1]"), 15, "[1, 1, 0, 1, 1]");
    auto cfg = write_config(dir, body);
    Captured c;
    EXPECT_EQ(cli::cmd_simulate(cfg.string(), (dir / "out").string(), std::nullopt, c.ctx()), 2);
    EXPECT_NE(c.err.str().find("oscillator 2"), std::string::npos) << c.err.str();

    Captured missing;
    EXPECT_EQ(cli::cmd_simulate((dir / "nope.json").string(), (dir / "out").string(), std::nullopt,
                                missing.ctx()),
              2);
}

TEST(Cli, ReproduceUnknownPreset)
{
    Captured c;
    EXPECT_EQ(cli::cmd_reproduce("fig7", scratch("bad").string(), std::nullopt, c.ctx()), 2);
}

TEST(Cli, ReproduceWritesScenario)
{
    auto dir = scratch("reproduce");
    Captured c;
    ASSERT_EQ(cli::cmd_reproduce("fig5a", dir.string(), std::nullopt, c.ctx()), 0);
    auto saved = load_scenario((dir / "scenario.json").string());
    EXPECT_EQ(to_json(saved).dump(), to_json(preset_config("fig5a")).dump());
    EXPECT_NE(c.out.str().find("firing order 0"), std::string::npos) << c.out.str();
}

TEST(Cli, MapTwoOscillators)
{
    auto dir = scratch("map2");
    Captured c;
    cli::MapArgs args;
    args.n = 2;
    args.d0 = {0.1};
    args.out_dir = dir.string();
    ASSERT_EQ(cli::cmd_map(args, c.ctx()), 0);
    EXPECT_NE(c.out.str().find("converged to ±0.5"), std::string::npos);
    EXPECT_EQ(first_line(dir / "map_trajectory.csv"), "cycle_index,d_1");

    Captured z;
    args.d0 = {0.0};
    ASSERT_EQ(cli::cmd_map(args, z.ctx()), 0);
    EXPECT_EQ(z.out.str(), "unstable fixed point, no motion\n");
}

TEST(Cli, MapThreeOscillators)
{
    Captured c;
    cli::MapArgs args;
    args.n = 3;
    args.steps = 500;
    args.out_dir = scratch("map3").string();
    ASSERT_EQ(cli::cmd_map(args, c.ctx()), 0);
    EXPECT_NE(c.out.str().find("converged to fixed point d* = (0."), std::string::npos) << c.out.str();

    Captured bad;
    args.d0 = {0.5, 0.2};
    EXPECT_EQ(cli::cmd_map(args, bad.ctx()), 2);
}

TEST(Cli, RhoC)
{
    auto dir = scratch("rho");
    Captured c;
    ASSERT_EQ(cli::cmd_rho_c({}, 1e-3, dir.string(), c.ctx()), 0);
    double rho = std::stod(c.out.str().substr(c.out.str().find('=') + 1));
    EXPECT_NEAR(rho, 1.11, 0.01);
    EXPECT_EQ(first_line(dir / "rho_sweep.csv"), "rho,x_star,alternating");

    Captured four;
    InteractionSpec steep;
    steep.gain = 4.0;
    ASSERT_EQ(cli::cmd_rho_c(steep, 1e-3, dir.string(), four.ctx()), 0);
    EXPECT_GT(std::stod(four.out.str().substr(four.out.str().find('=') + 1)), rho);

    Captured tight;
    EXPECT_EQ(cli::cmd_rho_c({}, 1e-7, dir.string(), tight.ctx()), 2);
}

TEST(Cli, Orbits)
{
    for (auto [n, samples, found] : {std::tuple<std::size_t, std::size_t, const char*>{2, 200, "found 1, expected 1"},
                                     {3, 500, "found 2, expected 2"},
                                     {4, 2000, "found 6, expected 6"}}) {
        Captured c;
        ASSERT_EQ(cli::cmd_orbits(n, samples, 42, {}, c.ctx()), 0);
        EXPECT_NE(c.out.str().find(found), std::string::npos) << c.out.str();
    }
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(cli::exit_code(ErrorKind::validation), 2);
    EXPECT_EQ(cli::exit_code(ErrorKind::ordering_violation), 2);
    EXPECT_EQ(cli::exit_code(ErrorKind::solver), 3);
    EXPECT_EQ(cli::exit_code(ErrorKind::resource_limit), 4);
    EXPECT_EQ(cli::exit_code(ErrorKind::internal), 1);
}
