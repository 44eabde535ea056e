#include <gtest/gtest.h>

#include "desync/scenario.hpp"

using namespace desync;
using nlohmann::json;

namespace {

json base_config()
{
    return json::parse(R"({
        "schema": 1,
        "name": "five",
        "seed": 42,
        "oscillators": {"count": 5, "frequencies": [1, 1, 1, 1, 1],
                        "initial_phases": {"uniform": [0, 0.01]}},
        "topology": {"kind": "complete"},
        "interaction": {"family": "smooth_log", "gain": 2},
        "delays": {"uniform": 0.0},
        "duration": 100,
        "sample_interval": 0.05
    })");
}

std::string validation_message(const json& j)
{
    try {
        build_scenario(parse_scenario(j));
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::validation);
        return e.what();
    }
    ADD_FAILURE() << "no error";
    return {};
}

}  // namespace

TEST(Scenario, ParsesAndBuilds)
{
    auto s = build_scenario(parse_scenario(base_config()));
    EXPECT_EQ(s.name, "five");
    EXPECT_EQ(s.oscillators.size(), 5u);
    EXPECT_EQ(s.topology.edges().size(), 10u);
    for (const auto& o : s.oscillators) {
        EXPECT_GE(o.initial_phase, 0.0);
        EXPECT_LT(o.initial_phase, 0.01);
    }
    EXPECT_DOUBLE_EQ(s.window, 20.0);
}

TEST(Scenario, RoundTripsThroughJson)
{
    auto c = parse_scenario(base_config());
    auto again = parse_scenario(to_json(c));
    EXPECT_EQ(to_json(c).dump(), to_json(again).dump());
    auto p = preset_config("fig5d");
    EXPECT_EQ(to_json(p).dump(), to_json(parse_scenario(to_json(p))).dump());
}

TEST(Scenario, ZeroFrequencyNamesTheOscillator)
{
    auto j = base_config();
    j["oscillators"]["frequencies"][3] = 0;
    auto msg = validation_message(j);
    EXPECT_NE(msg.find("oscillator 3"), std::string::npos) << msg;
}

TEST(Scenario, DelayAboveCapIsRejected)
{
    auto j = base_config();
    j["delays"]["uniform"] = 0.6;
    auto msg = validation_message(j);
    EXPECT_NE(msg.find("delay cap"), std::string::npos) << msg;

    j = base_config();
    j["delays"]["per_edge"] = json::array({json::array({0, 1, 0.6})});
    msg = validation_message(j);
    EXPECT_NE(msg.find("delay cap"), std::string::npos) << msg;
}

TEST(Scenario, CrossReferencesAreChecked)
{
    auto j = base_config();
    j["oscillators"]["frequencies"] = {1, 1, 1};
    EXPECT_NE(validation_message(j).find("oscillators.frequencies"), std::string::npos);

    j = base_config();
    j["topology"] = {{"kind", "edges"}, {"edges", {{0, 7}}}};
    validation_message(j);

    j = base_config();
    j["interaction"] = {{"family", "shifted_cubic"}, {"tau", 0.4}, {"beta", 0.9}};
    EXPECT_NE(validation_message(j).find("interaction"), std::string::npos);

    j = base_config();
    j["delays"]["per_edge"] = {{0, 0, 0.1}};
    EXPECT_NE(validation_message(j).find("no such edge"), std::string::npos);

    j = base_config();
    j.erase("duration");
    EXPECT_THROW(parse_scenario(j), Error);

    j = base_config();
    j["schema"] = 2;
    EXPECT_THROW(parse_scenario(j), Error);
}

TEST(Scenario, SampledFrequenciesRespectTheBound)
{
    PeriodDistribution dist{1.0, 0.05, std::nullopt};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto w = sample_frequencies(5, dist, 1.1, seed);
        auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        EXPECT_LT(*hi / *lo, 1.1);
    }
    EXPECT_EQ(sample_frequencies(5, dist, 1.1, 3), sample_frequencies(5, dist, 1.1, 3));
    EXPECT_NE(sample_frequencies(5, dist, 1.1, 3), sample_frequencies(5, dist, 1.1, 4));
}

TEST(Scenario, SeedChangesInitialPhases)
{
    auto c = parse_scenario(base_config());
    auto a = build_scenario(c);
    c.seed = 7;
    auto b = build_scenario(c);
    EXPECT_NE(a.oscillators[0].initial_phase, b.oscillators[0].initial_phase);
}

TEST(Presets, Parameters)
{
    for (const auto& name : preset_names()) {
        auto c = preset_config(name);
        EXPECT_EQ(c.count, 5u);
        EXPECT_EQ(c.seed, preset_seed);
        EXPECT_EQ(c.topology.kind, "complete");
    }
    EXPECT_EQ(preset_config("fig5a").interaction.family, "smooth_log");
    EXPECT_EQ(preset_config("fig5c").interaction.family, "shifted_cubic");
    EXPECT_GE(preset_config("fig5c").interaction.tau, 0.01);
    EXPECT_DOUBLE_EQ(preset_config("fig5d").uniform_delay, 0.01);
    EXPECT_TRUE(preset_config("fig5b").periods.has_value());
    EXPECT_THROW(preset_config("fig6"), Error);
}

TEST(Presets, Fig5aDesynchronizes)
{
    auto r = run_preset("fig5a");
    EXPECT_GE(r.order.front().value, 0.99);
    ASSERT_TRUE(r.verdict.converged);
    EXPECT_TRUE(r.verdict.all_desynchronized());
    ASSERT_TRUE(r.limit_cycle.has_value());
    EXPECT_EQ(r.limit_cycle->order.size(), 5u);
    // five firings a cycle, evenly spaced
    auto tail = firings_in_window(firing_sequence(r.trace), 180.0);
    for (std::size_t k = 1; k < tail.size(); ++k)
        EXPECT_NEAR(tail[k].time - tail[k - 1].time, r.limit_cycle->period / 5.0, 1e-9);
}

TEST(Presets, Fig5cDesynchronizesDespiteDelay)
{
    auto r = run_preset("fig5c");
    EXPECT_TRUE(r.verdict.converged);
    EXPECT_TRUE(r.verdict.all_desynchronized());
}
