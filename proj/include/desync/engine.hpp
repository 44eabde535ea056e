#pragma once

// Event-driven simulation of pulse-coupled phase oscillators.
//
// Between events every phase advances linearly at its own frequency, so the
// next firing of each oscillator is known in closed form and no time stepping
// is involved. Each oscillator is tracked by an anchor (time, phase) set at
// its last pulse reception plus the number of firings since then; firing
// times are therefore computed with a single rounding rather than accumulated.
//
// Ordering of simultaneous events: deliveries before firings, then by lower
// source (or firing oscillator) id, then by lower target id, then by
// scheduling order.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "desync/error.hpp"
#include "desync/interaction.hpp"
#include "desync/phase.hpp"
#include "desync/topology.hpp"

namespace desync {

struct OscillatorConfig {
    std::size_t id = 0;
    double frequency = 1.0;  // cycles per unit time
    double initial_phase = 0.0;
};

enum class EventKind : std::uint8_t { delivery = 0, firing = 1 };

inline const char* to_string(EventKind k) noexcept
{
    return k == EventKind::firing ? "fire" : "pulse";
}

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::firing;
    std::size_t oscillator = 0;  // the firing oscillator, or the pulse target
    std::size_t source = 0;      // equals oscillator for firings
    std::uint64_t sequence = 0;

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

class EventTrace {
public:
    std::size_t oscillators = 0;
    double duration = 0.0;
    double sample_interval = 0.0;
    std::vector<SimEvent> events;
    std::vector<double> snapshot_times;
    std::vector<double> snapshot_phases;  // row-major, one row per snapshot

    std::size_t snapshot_count() const noexcept { return snapshot_times.size(); }

    std::span<const double> snapshot(std::size_t row) const
    {
        return {snapshot_phases.data() + row * oscillators, oscillators};
    }

    friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

struct Firing {
    double time = 0.0;
    std::size_t id = 0;

    friend bool operator==(const Firing&, const Firing&) = default;
};

inline std::vector<Firing> firing_sequence(const EventTrace& trace)
{
    std::vector<Firing> out;
    for (const auto& e : trace.events)
        if (e.kind == EventKind::firing)
            out.push_back({e.time, e.oscillator});
    return out;
}

struct RunLimits {
    std::uint64_t max_events = 100'000'000;
    bool record_deliveries = true;
};

/// Called before each event is applied with the phases at that instant.
struct NoObserver {
    void operator()(const SimEvent&, std::span<const double>) const noexcept {}
};

template <InteractionFamily F>
class Simulator {
public:
    Simulator(const NetworkTopology& topology, std::vector<OscillatorConfig> oscillators, F f)
        : topology_(topology), f_(std::move(f))
    {
        if (oscillators.empty())
            fail(ErrorKind::invalid_argument, "simulation needs at least one oscillator");
        if (oscillators.size() != topology.size()) {
            std::ostringstream os;
            os << "topology has " << topology.size() << " oscillators, configuration has "
               << oscillators.size();
            fail(ErrorKind::validation, os.str());
        }
        state_.resize(oscillators.size());
        for (std::size_t i = 0; i < oscillators.size(); ++i) {
            const auto& o = oscillators[i];
            if (o.id != i) {
                std::ostringstream os;
                os << "oscillator at position " << i << " has id " << o.id;
                fail(ErrorKind::validation, os.str());
            }
            if (!std::isfinite(o.frequency) || o.frequency <= 0.0) {
                std::ostringstream os;
                os << "oscillator " << i << ": frequency " << o.frequency << " must be positive";
                fail(ErrorKind::validation, os.str());
            }
            if (!std::isfinite(o.initial_phase) || o.initial_phase < 0.0 || o.initial_phase >= 1.0) {
                std::ostringstream os;
                os << "oscillator " << i << ": initial phase " << o.initial_phase
                   << " outside [0,1)";
                fail(ErrorKind::validation, os.str());
            }
            state_[i] = {o.frequency, 0.0, o.initial_phase, 0, 0};
        }
    }

    template <class Observer = NoObserver>
        requires std::invocable<Observer&, const SimEvent&, std::span<const double>>
    EventTrace run(double duration, double sample_interval, RunLimits limits = {},
                   Observer observer = {})
    {
        if (!std::isfinite(duration) || duration <= 0.0)
            fail(ErrorKind::invalid_argument, "duration must be positive");
        if (!std::isfinite(sample_interval) || sample_interval <= 0.0)
            fail(ErrorKind::invalid_argument, "sample interval must be positive");

        const std::size_t n = state_.size();
        EventTrace trace;
        trace.oscillators = n;
        trace.duration = duration;
        trace.sample_interval = sample_interval;

        Queue queue;
        std::uint64_t scheduled = 0;
        auto schedule_firing = [&](std::size_t i) {
            const auto& s = state_[i];
            double t = s.anchor_time +
                       (static_cast<double>(s.fires + 1) - s.anchor_phase) / s.frequency;
            queue.push({t, EventKind::firing, i, i, scheduled++, s.version});
        };
        for (std::size_t i = 0; i < n; ++i)
            schedule_firing(i);

        std::uint64_t next_sample = 0;
        std::vector<double> phases(n);
        auto sample_time = [&] { return static_cast<double>(next_sample) * sample_interval; };
        auto emit_snapshots_before = [&](double t, bool inclusive) {
            for (double s = sample_time(); s <= duration && (inclusive ? s <= t : s < t);
                 s = sample_time()) {
                trace.snapshot_times.push_back(s);
                for (std::size_t i = 0; i < n; ++i)
                    trace.snapshot_phases.push_back(phase_at(i, s));
                ++next_sample;
            }
        };

        std::uint64_t processed = 0;
        while (!queue.empty() && queue.top().time <= duration) {
            Pending ev = queue.top();
            queue.pop();
            if (ev.kind == EventKind::firing && ev.version != state_[ev.primary].version)
                continue;
            emit_snapshots_before(ev.time, false);
            if (++processed > limits.max_events) {
                std::ostringstream os;
                os << "event limit of " << limits.max_events << " exceeded at t = " << ev.time;
                fail(ErrorKind::resource_limit, os.str());
            }

            SimEvent record;
            record.time = ev.time;
            record.kind = ev.kind;
            record.oscillator = ev.kind == EventKind::firing ? ev.primary : ev.secondary;
            record.source = ev.primary;
            record.sequence = processed - 1;

            if constexpr (!std::same_as<Observer, NoObserver>) {
                for (std::size_t i = 0; i < n; ++i)
                    phases[i] = phase_at(i, ev.time);
                observer(record, std::span<const double>(phases));
            }

            if (ev.kind == EventKind::firing) {
                auto& s = state_[ev.primary];
                ++s.fires;
                for (const auto& nb : topology_.neighbours(ev.primary))
                    queue.push({ev.time + nb.delay, EventKind::delivery, ev.primary, nb.id,
                                scheduled++, 0});
                schedule_firing(ev.primary);
                trace.events.push_back(record);
            } else {
                receive(ev.secondary, ev.time);
                schedule_firing(ev.secondary);
                if (limits.record_deliveries)
                    trace.events.push_back(record);
            }
        }
        emit_snapshots_before(duration, true);
        return trace;
    }

    /// Current phase of oscillator i at time t, in [0,1).
    double phase_at(std::size_t i, double t) const
    {
        const auto& s = state_[i];
        double x = s.anchor_phase + s.frequency * (t - s.anchor_time) -
                   static_cast<double>(s.fires);
        if (x < 0.0)
            return 0.0;
        return x < 1.0 ? x : below_one;
    }

private:
    static constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

    struct OscillatorState {
        double frequency;
        double anchor_time;
        double anchor_phase;
        std::uint64_t fires;    // firings since the anchor
        std::uint64_t version;  // invalidates stale firing events
    };

    struct Pending {
        double time;
        EventKind kind;
        std::size_t primary;    // firing oscillator or pulse source
        std::size_t secondary;  // pulse target (== primary for firings)
        std::uint64_t seq;
        std::uint64_t version;
    };

    struct Later {
        bool operator()(const Pending& a, const Pending& b) const noexcept
        {
            if (a.time != b.time)
                return a.time > b.time;
            if (a.kind != b.kind)
                return a.kind > b.kind;
            if (a.primary != b.primary)
                return a.primary > b.primary;
            if (a.secondary != b.secondary)
                return a.secondary > b.secondary;
            return a.seq > b.seq;
        }
    };

    using Queue = std::priority_queue<Pending, std::vector<Pending>, Later>;

    void receive(std::size_t j, double t)
    {
        // an oscillator whose firing is due at t is at threshold, not below it
        const auto& st = state_[j];
        double x = st.anchor_phase + st.frequency * (t - st.anchor_time) -
                   static_cast<double>(st.fires);
        x = std::clamp(x, 0.0, 1.0);
        double y = f_.lift(x);
        if (!std::isfinite(y)) {
            std::ostringstream os;
            os << f_.describe() << " returned a non-finite value at x = " << x;
            fail(ErrorKind::invalid_argument, os.str());
        }
        // A pulse that carries the phase to threshold fires at once; one that
        // carries it below zero wraps backwards around the circle.
        if (y >= 1.0)
            y = 1.0;
        else if (y < 0.0)
            y = wrap_unit(y);
        auto& s = state_[j];
        s.anchor_time = t;
        s.anchor_phase = y;
        s.fires = 0;
        ++s.version;
    }

    NetworkTopology topology_;
    F f_;
    std::vector<OscillatorState> state_;
};

template <InteractionFamily F>
EventTrace run(const NetworkTopology& topology, const std::vector<OscillatorConfig>& oscillators,
               const F& f, double duration, double sample_interval, RunLimits limits = {})
{
    Simulator<F> sim(topology, oscillators, f);
    return sim.run(duration, sample_interval, limits);
}

/// Oscillators with the given frequencies and initial phases, ids in order.
inline std::vector<OscillatorConfig> make_oscillators(const std::vector<double>& frequencies,
                                                      const std::vector<double>& phases)
{
    if (frequencies.size() != phases.size())
        fail(ErrorKind::validation, "frequency and phase lists differ in length");
    std::vector<OscillatorConfig> out;
    for (std::size_t i = 0; i < frequencies.size(); ++i)
        out.push_back({i, frequencies[i], phases[i]});
    return out;
}

}  // namespace desync
