#pragma once

// Offline diagnostics over recorded traces: coherence, pairwise
// desynchronization, firing-order stability and limit-cycle detection. Nothing
// here re-runs the engine.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "desync/engine.hpp"
#include "desync/error.hpp"
#include "desync/phase.hpp"
#include "desync/phasemap.hpp"
#include "desync/topology.hpp"

namespace desync {

/// P = |sum_k exp(2 pi i x_k)| / N; 1 for synchrony, 0 for a balanced splay.
inline double order_parameter(std::span<const double> phases)
{
    if (phases.empty())
        fail(ErrorKind::invalid_argument, "order parameter of an empty phase vector");
    // summed in sorted order so the result is exactly permutation invariant
    std::vector<double> sorted(phases.begin(), phases.end());
    std::sort(sorted.begin(), sorted.end());
    double re = 0.0, im = 0.0;
    for (double x : sorted) {
        double a = 2.0 * std::numbers::pi * x;
        re += std::cos(a);
        im += std::sin(a);
    }
    double p = std::hypot(re, im) / static_cast<double>(phases.size());
    return std::clamp(p, 0.0, 1.0);
}

struct OrderSample {
    double time = 0.0;
    double value = 0.0;
};

using OrderParameterSeries = std::vector<OrderSample>;

inline OrderParameterSeries order_parameter_series(const EventTrace& trace)
{
    OrderParameterSeries out;
    out.reserve(trace.snapshot_count());
    for (std::size_t r = 0; r < trace.snapshot_count(); ++r)
        out.push_back({trace.snapshot_times[r], order_parameter(trace.snapshot(r))});
    return out;
}

/// Mean of P over samples with time >= from.
inline double mean_order_parameter(const OrderParameterSeries& series, double from)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : series)
        if (s.time >= from) {
            sum += s.value;
            ++count;
        }
    if (count == 0)
        fail(ErrorKind::invalid_argument, "no order-parameter samples in window");
    return sum / static_cast<double>(count);
}

/// Default analysis window: the final fifth of a trace.
inline constexpr double default_window_fraction = 0.2;

/// Minimum time-averaged wrapped distance for an edge to count as locally
/// desynchronized, given the larger endpoint degree: 1 / (2 max(degree+1, 2)).
inline double desync_threshold(std::size_t degree)
{
    return 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(degree + 1, 2)));
}

inline std::vector<Firing> firings_in_window(std::span<const Firing> firings, double from)
{
    std::vector<Firing> out;
    for (const auto& f : firings)
        if (f.time >= from)
            out.push_back(f);
    return out;
}

/// If the firing sequence is one cyclic order of all participating
/// oscillators repeated throughout, returns that order (canonical rotation).
inline std::optional<std::vector<std::size_t>> constant_cyclic_order(std::span<const Firing> firings)
{
    std::set<std::size_t> ids;
    for (const auto& f : firings)
        ids.insert(f.id);
    const std::size_t m = ids.size();
    if (m == 0 || firings.size() < 2 * m)
        return std::nullopt;
    for (std::size_t k = m; k < firings.size(); ++k)
        if (firings[k].id != firings[k - m].id)
            return std::nullopt;
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < m; ++k)
        order.push_back(firings[k].id);
    if (std::set<std::size_t>(order.begin(), order.end()).size() != m)
        return std::nullopt;
    return canonical_cyclic_order(order);
}

/// True iff firings of a and b strictly alternate in time (and each fires at
/// least twice). Simultaneous firings do not alternate.
inline bool firings_alternate(std::span<const Firing> firings, std::size_t a, std::size_t b)
{
    std::optional<std::size_t> last;
    double last_time = 0.0;
    std::size_t ca = 0, cb = 0;
    for (const auto& f : firings) {
        if (f.id != a && f.id != b)
            continue;
        if (last && (*last == f.id || f.time == last_time))
            return false;
        last = f.id;
        last_time = f.time;
        (f.id == a ? ca : cb)++;
    }
    return ca >= 2 && cb >= 2;
}

/// Mean firing lag of b behind a as a fraction of a's inter-firing interval,
/// over every firing interval of a that contains a firing of b.
inline std::optional<double> firing_phase_offset(std::span<const Firing> firings, std::size_t a,
                                                 std::size_t b)
{
    std::vector<double> ta, tb;
    for (const auto& f : firings) {
        if (f.id == a)
            ta.push_back(f.time);
        else if (f.id == b)
            tb.push_back(f.time);
    }
    double sum = 0.0;
    std::size_t count = 0;
    auto it = tb.begin();
    for (std::size_t k = 0; k + 1 < ta.size(); ++k) {
        it = std::lower_bound(it, tb.end(), ta[k]);
        if (it == tb.end())
            break;
        if (*it < ta[k + 1]) {
            sum += (*it - ta[k]) / (ta[k + 1] - ta[k]);
            ++count;
        }
    }
    if (count == 0)
        return std::nullopt;
    return sum / static_cast<double>(count);
}

struct LimitCycle {
    double period = 0.0;
    std::vector<std::size_t> order;  // canonical rotation
};

/// Smallest repeating pattern of firing ids whose inter-firing intervals also
/// repeat within tolerance. Needs at least three firings per participating
/// oscillator.
inline std::optional<LimitCycle> detect_limit_cycle(std::span<const Firing> firings, double tolerance)
{
    std::set<std::size_t> ids;
    for (const auto& f : firings)
        ids.insert(f.id);
    const std::size_t n = firings.size();
    if (ids.empty() || n < 3 * ids.size())
        return std::nullopt;

    for (std::size_t len = ids.size(); 3 * len <= n; ++len) {
        bool ok = true;
        for (std::size_t k = len; k < n && ok; ++k)
            ok = firings[k].id == firings[k - len].id;
        for (std::size_t k = len + 1; k < n && ok; ++k) {
            double g1 = firings[k].time - firings[k - 1].time;
            double g0 = firings[k - len].time - firings[k - len - 1].time;
            ok = std::abs(g1 - g0) <= tolerance;
        }
        if (!ok)
            continue;
        std::size_t cycles = (n - 1) / len;
        double period = (firings[cycles * len].time - firings[0].time) / static_cast<double>(cycles);
        std::vector<std::size_t> order;
        for (std::size_t k = 0; k < len; ++k)
            order.push_back(firings[k].id);
        return LimitCycle{period, canonical_cyclic_order(order)};
    }
    return std::nullopt;
}

struct EdgeVerdict {
    std::size_t a = 0;
    std::size_t b = 0;
    double distance = 0.0;   // time-averaged wrapped phase distance
    double threshold = 0.0;
    bool alternating = false;
    bool desynchronized = false;
};

struct DesyncVerdict {
    std::vector<EdgeVerdict> edges;
    bool converged = false;
    std::optional<double> period;
    std::vector<std::size_t> firing_order;
    std::string diagnostic;

    bool all_desynchronized() const noexcept
    {
        return std::all_of(edges.begin(), edges.end(),
                           [](const EdgeVerdict& e) { return e.desynchronized; });
    }
};

inline constexpr double limit_cycle_tolerance_default = 1e-6;

/// Per-edge verdicts over the final `window` time units of the trace. An edge
/// is locally desynchronized when its endpoints strictly alternate and their
/// mean wrapped distance reaches desync_threshold.
inline DesyncVerdict local_desync(const EventTrace& trace, const NetworkTopology& topology,
                                  double window)
{
    if (!(window > 0.0) || !(window < trace.duration))
        fail(ErrorKind::invalid_argument, "analysis window must be positive and shorter than the trace");
    if (topology.size() != trace.oscillators)
        fail(ErrorKind::invalid_argument, "topology does not match trace");

    const double from = trace.duration - window;
    const auto all = firing_sequence(trace);
    const auto tail = firings_in_window(all, from);

    DesyncVerdict verdict;
    for (const auto& e : topology.edges()) {
        EdgeVerdict ev;
        ev.a = e.a;
        ev.b = e.b;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < trace.snapshot_count(); ++r) {
            if (trace.snapshot_times[r] < from)
                continue;
            auto row = trace.snapshot(r);
            sum += circular_distance(row[e.a], row[e.b]);
            ++count;
        }
        ev.distance = count ? sum / static_cast<double>(count) : 0.0;
        ev.threshold = desync_threshold(std::max(topology.degree(e.a), topology.degree(e.b)));
        ev.alternating = firings_alternate(tail, e.a, e.b);
        ev.desynchronized = ev.alternating && ev.distance >= ev.threshold;
        verdict.edges.push_back(ev);
    }

    auto order = constant_cyclic_order(tail);
    if (order) {
        verdict.converged = true;
        verdict.firing_order = *order;
        if (auto lc = detect_limit_cycle(tail, limit_cycle_tolerance_default))
            verdict.period = lc->period;
    } else {
        verdict.diagnostic = "firing order not constant over the analysis window";
    }
    return verdict;
}

}  // namespace desync
