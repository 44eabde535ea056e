#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "desync/analysis.hpp"
#include "desync/engine.hpp"
#include "desync/interaction.hpp"
#include "desync/topology.hpp"

using namespace desync;

namespace {

// Trace of phases rotating rigidly from the given start, no events.
EventTrace rigid_trace(const std::vector<double>& start, double duration, double dt)
{
    EventTrace t;
    t.oscillators = start.size();
    t.duration = duration;
    t.sample_interval = dt;
    for (std::size_t r = 0; static_cast<double>(r) * dt <= duration; ++r) {
        double time = static_cast<double>(r) * dt;
        t.snapshot_times.push_back(time);
        for (double x : start)
            t.snapshot_phases.push_back(wrap_unit(x + time));
    }
    return t;
}

std::vector<Firing> periodic_firings(const std::vector<std::size_t>& order,
                                     const std::vector<double>& gaps, std::size_t cycles)
{
    std::vector<Firing> out;
    double t = 0.3;
    for (std::size_t c = 0; c < cycles; ++c)
        for (std::size_t k = 0; k < order.size(); ++k) {
            out.push_back({t, order[k]});
            t += gaps[k];
        }
    return out;
}

}  // namespace

TEST(OrderParameter, ReferenceConfigurations)
{
    EXPECT_NEAR(order_parameter(std::vector<double>{0.3, 0.3, 0.3}), 1.0, 1e-15);
    EXPECT_NEAR(order_parameter(std::vector<double>{0.0, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(order_parameter(std::vector<double>{0.0, 0.25, 0.5, 0.75}), 0.0, 1e-15);
    EXPECT_NEAR(order_parameter(std::vector<double>{0.0}), 1.0, 1e-15);
    EXPECT_THROW(order_parameter(std::vector<double>{}), Error);
}

TEST(OrderParameter, InvariantUnderRotation)
{
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(5);
        for (auto& v : x)
            v = u(g);
        double c = u(g);
        std::vector<double> y;
        for (double v : x)
            y.push_back(wrap_unit(v + c));
        EXPECT_NEAR(order_parameter(x), order_parameter(y), 1e-12);
        double p = order_parameter(x);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(OrderParameter, InvariantUnderPermutation)
{
    std::vector<double> x{0.1, 0.7, 0.35, 0.9};
    auto p = order_parameter(x);
    std::sort(x.begin(), x.end());
    do {
        EXPECT_EQ(order_parameter(x), p);
    } while (std::next_permutation(x.begin(), x.end()));
}

TEST(OrderParameter, SplaySeriesVanishes)
{
    auto t = rigid_trace({0.0, 0.2, 0.4, 0.6, 0.8}, 5.0, 0.01);
    for (const auto& s : order_parameter_series(t))
        EXPECT_LE(s.value, 1e-12);
    auto single = rigid_trace({0.4}, 3.0, 0.1);
    for (const auto& s : order_parameter_series(single))
        EXPECT_NEAR(s.value, 1.0, 1e-15);
}

TEST(OrderParameter, WindowMean)
{
    OrderParameterSeries s{{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.1}, {3.0, 0.3}};
    EXPECT_NEAR(mean_order_parameter(s, 2.0), 0.2, 1e-15);
    EXPECT_THROW(mean_order_parameter(s, 4.0), Error);
}

TEST(Firings, CyclicOrderDetection)
{
    auto f = periodic_firings({3, 1, 0, 2}, {0.25, 0.25, 0.25, 0.25}, 5);
    auto order = constant_cyclic_order(f);
    ASSERT_TRUE(order.has_value());
    EXPECT_EQ(*order, (std::vector<std::size_t>{0, 2, 3, 1}));
    std::swap(f[9].id, f[10].id);
    EXPECT_FALSE(constant_cyclic_order(f).has_value());
}

TEST(Firings, Alternation)
{
    auto f = periodic_firings({0, 1, 2}, {0.3, 0.3, 0.4}, 4);
    EXPECT_TRUE(firings_alternate(f, 0, 1));
    EXPECT_TRUE(firings_alternate(f, 0, 2));
    f.push_back({100.0, 0});
    f.push_back({101.0, 0});
    EXPECT_FALSE(firings_alternate(f, 0, 1));
}

TEST(Firings, PhaseOffset)
{
    auto f = periodic_firings({0, 1}, {0.3, 0.7}, 10);
    auto off = firing_phase_offset(f, 0, 1);
    ASSERT_TRUE(off.has_value());
    EXPECT_NEAR(*off, 0.3, 1e-12);
    EXPECT_NEAR(*firing_phase_offset(f, 1, 0), 0.7, 1e-12);
}

TEST(LimitCycle, RecoversSyntheticPeriodAndOrder)
{
    std::vector<double> gaps{0.11, 0.2, 0.31, 0.15, 0.23};
    double period = std::accumulate(gaps.begin(), gaps.end(), 0.0);
    auto f = periodic_firings({4, 2, 0, 3, 1}, gaps, 8);
    auto lc = detect_limit_cycle(f, 1e-9);
    ASSERT_TRUE(lc.has_value());
    EXPECT_NEAR(lc->period, period, 1e-12);
    EXPECT_EQ(lc->order, (std::vector<std::size_t>{0, 3, 1, 4, 2}));
}

TEST(LimitCycle, SingleOscillator)
{
    auto f = periodic_firings({0}, {0.5}, 6);
    auto lc = detect_limit_cycle(f, 1e-9);
    ASSERT_TRUE(lc.has_value());
    EXPECT_NEAR(lc->period, 0.5, 1e-12);
    EXPECT_EQ(lc->order, std::vector<std::size_t>{0});
}

TEST(LimitCycle, TransientGivesNone)
{
    std::vector<Firing> f;
    double t = 0.0;
    for (int k = 0; k < 20; ++k) {
        t += 0.2 + 0.01 * k;
        f.push_back({t, static_cast<std::size_t>(k % 3)});
    }
    EXPECT_FALSE(detect_limit_cycle(f, 1e-6).has_value());
    EXPECT_FALSE(detect_limit_cycle(std::vector<Firing>{{1.0, 0}, {2.0, 0}}, 1e-6).has_value());
}

TEST(LocalDesync, Threshold)
{
    EXPECT_DOUBLE_EQ(desync_threshold(0), 0.25);
    EXPECT_DOUBLE_EQ(desync_threshold(1), 0.25);
    EXPECT_DOUBLE_EQ(desync_threshold(2), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(desync_threshold(4), 0.1);
}

TEST(LocalDesync, SynchronizedTraceIsNegative)
{
    auto trace = run(complete_graph(2), make_oscillators({1.0, 1.0}, {0.0, 0.0}), SmoothLog(2.0), 20.0,
                     0.05);
    auto v = local_desync(trace, complete_graph(2), 4.0);
    ASSERT_EQ(v.edges.size(), 1u);
    EXPECT_NEAR(v.edges[0].distance, 0.0, 1e-12);
    EXPECT_FALSE(v.edges[0].alternating);
    EXPECT_FALSE(v.all_desynchronized());
}

TEST(LocalDesync, RingOfSix)
{
    auto topo = ring_graph(6);
    auto trace = run(topo, make_oscillators(std::vector<double>(6, 1.0), {0.0, 0.002, 0.004, 0.006, 0.008, 0.001}),
                     SmoothLog(2.0), 300.0, 0.02);
    auto v = local_desync(trace, topo, 60.0);
    EXPECT_EQ(v.edges.size(), 6u);
    EXPECT_TRUE(v.all_desynchronized());
    EXPECT_TRUE(v.converged) << v.diagnostic;
}

TEST(LocalDesync, RejectsBadWindow)
{
    auto trace = run(complete_graph(2), make_oscillators({1.0, 1.0}, {0.0, 0.5}), SmoothLog(2.0), 10.0, 0.1);
    EXPECT_THROW(local_desync(trace, complete_graph(2), 0.0), Error);
    EXPECT_THROW(local_desync(trace, complete_graph(2), 10.0), Error);
    EXPECT_THROW(local_desync(trace, complete_graph(3), 2.0), Error);
}
