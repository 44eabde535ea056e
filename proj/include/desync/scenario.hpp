#pragma once

// Scenario files and the built-in five-oscillator presets.
//
// A scenario is a JSON document (schema 1):
//
//   {
//     "schema": 1,
//     "name": "fig5a",
//     "seed": 42,
//     "oscillators": {
//       "count": 5,
//       "frequencies": [1, 1, 1, 1, 1],            // or "period_distribution"
//       "initial_phases": {"uniform": [0, 0.01]}   // or an explicit list
//     },
//     "topology": {"kind": "complete"},            // ring | erdos_renyi | edges
//     "interaction": {"family": "smooth_log", "gain": 2},
//     "delays": {"uniform": 0.0},                  // or "per_edge": [[a, b, d], ...]
//     "duration": 200,
//     "sample_interval": 0.02,
//     "analysis": {"window_fraction": 0.2}
//   }
//
// "period_distribution": {"kind": "normal", "mean": 1, "sd": 0.05,
// "max_pairwise_ratio": "rho_c" | <number>} draws periods and rejects whole
// draws whose fastest/slowest frequency ratio reaches the bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "desync/analysis.hpp"
#include "desync/engine.hpp"
#include "desync/error.hpp"
#include "desync/interaction.hpp"
#include "desync/phasemap.hpp"
#include "desync/rng.hpp"
#include "desync/topology.hpp"

namespace desync {

inline constexpr int scenario_schema = 1;

struct TopologySpec {
    std::string kind = "complete";
    double p = 0.5;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct PeriodDistribution {
    double mean = 1.0;
    double sd = 0.05;
    std::optional<double> max_ratio;  // unset: bound by rho_c of the interaction
};

struct InteractionSpec {
    std::string family = "smooth_log";
    double gain = 2.0;
    double tau = 0.1;
    double beta = 0.5;

    Interaction build() const
    {
        if (family == "smooth_log")
            return SmoothLog(gain);
        if (family == "shifted_cubic")
            return ShiftedCubic::make(tau, beta);
        fail(ErrorKind::validation, "interaction.family: unknown family '" + family + "'");
    }
};

struct ScenarioConfig {
    int schema = scenario_schema;
    std::string name = "scenario";
    std::uint64_t seed = 42;
    std::size_t count = 0;
    std::optional<std::vector<double>> frequencies;
    std::optional<PeriodDistribution> periods;
    std::optional<std::vector<double>> initial_phases;
    std::pair<double, double> phase_range{0.0, 0.01};
    TopologySpec topology;
    InteractionSpec interaction;
    double uniform_delay = 0.0;
    std::vector<std::tuple<std::size_t, std::size_t, double>> edge_delays;
    double duration = 200.0;
    double sample_interval = 0.02;
    double window_fraction = default_window_fraction;
};

namespace detail {

[[noreturn]] inline void invalid_field(const std::string& field, const std::string& what)
{
    fail(ErrorKind::validation, field + ": " + what);
}

template <class T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& path)
{
    if (!j.contains(key))
        invalid_field(path + key, "missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        invalid_field(path + key, e.what());
    }
}

template <class T>
T get_or(const nlohmann::json& j, const std::string& key, const std::string& path, T fallback)
{
    return j.contains(key) ? get_field<T>(j, key, path) : fallback;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j)
{
    using detail::get_field;
    using detail::get_or;
    using detail::invalid_field;

    if (!j.is_object())
        invalid_field("<root>", "scenario must be a JSON object");
    ScenarioConfig c;
    c.schema = get_field<int>(j, "schema", "");
    if (c.schema != scenario_schema)
        invalid_field("schema", "unsupported schema version " + std::to_string(c.schema));
    c.name = get_or<std::string>(j, "name", "", c.name);
    c.seed = get_or<std::uint64_t>(j, "seed", "", c.seed);

    const auto& osc = j.contains("oscillators") ? j.at("oscillators") : nlohmann::json();
    if (!osc.is_object())
        invalid_field("oscillators", "missing or not an object");
    c.count = get_field<std::size_t>(osc, "count", "oscillators.");
    if (c.count == 0)
        invalid_field("oscillators.count", "must be at least 1");
    if (osc.contains("frequencies")) {
        c.frequencies = get_field<std::vector<double>>(osc, "frequencies", "oscillators.");
    } else if (osc.contains("period_distribution")) {
        const auto& pd = osc.at("period_distribution");
        const std::string p = "oscillators.period_distribution.";
        if (get_field<std::string>(pd, "kind", p) != "normal")
            invalid_field(p + "kind", "only 'normal' is supported");
        PeriodDistribution dist;
        dist.mean = get_field<double>(pd, "mean", p);
        dist.sd = get_field<double>(pd, "sd", p);
        if (pd.contains("max_pairwise_ratio")) {
            const auto& r = pd.at("max_pairwise_ratio");
            if (r.is_string()) {
                if (r.get<std::string>() != "rho_c")
                    invalid_field(p + "max_pairwise_ratio", "expected a number or \"rho_c\"");
            } else {
                dist.max_ratio = get_field<double>(pd, "max_pairwise_ratio", p);
            }
        }
        c.periods = dist;
    } else {
        invalid_field("oscillators", "needs 'frequencies' or 'period_distribution'");
    }
    if (osc.contains("initial_phases")) {
        const auto& ip = osc.at("initial_phases");
        if (ip.is_array()) {
            c.initial_phases = get_field<std::vector<double>>(osc, "initial_phases", "oscillators.");
        } else {
            auto range = get_field<std::vector<double>>(ip, "uniform", "oscillators.initial_phases.");
            if (range.size() != 2)
                invalid_field("oscillators.initial_phases.uniform", "expected [lo, hi]");
            c.phase_range = {range[0], range[1]};
        }
    }

    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        c.topology.kind = get_field<std::string>(t, "kind", "topology.");
        if (c.topology.kind == "erdos_renyi") {
            c.topology.p = get_field<double>(t, "p", "topology.");
        } else if (c.topology.kind == "edges") {
            c.topology.edges =
                get_field<std::vector<std::pair<std::size_t, std::size_t>>>(t, "edges", "topology.");
        } else if (c.topology.kind != "complete" && c.topology.kind != "ring") {
            invalid_field("topology.kind", "unknown generator '" + c.topology.kind + "'");
        }
    }

    if (j.contains("interaction")) {
        const auto& f = j.at("interaction");
        c.interaction.family = get_field<std::string>(f, "family", "interaction.");
        if (c.interaction.family == "smooth_log") {
            c.interaction.gain = get_or<double>(f, "gain", "interaction.", 2.0);
        } else if (c.interaction.family == "shifted_cubic") {
            c.interaction.tau = get_field<double>(f, "tau", "interaction.");
            c.interaction.beta = get_field<double>(f, "beta", "interaction.");
        } else {
            invalid_field("interaction.family", "unknown family '" + c.interaction.family + "'");
        }
    }

    if (j.contains("delays")) {
        const auto& d = j.at("delays");
        if (d.contains("uniform"))
            c.uniform_delay = get_field<double>(d, "uniform", "delays.");
        if (d.contains("per_edge")) {
            for (const auto& row : d.at("per_edge")) {
                if (!row.is_array() || row.size() != 3)
                    invalid_field("delays.per_edge", "rows must be [a, b, delay]");
                c.edge_delays.emplace_back(row[0].get<std::size_t>(), row[1].get<std::size_t>(),
                                           row[2].get<double>());
            }
        }
    }

    c.duration = get_field<double>(j, "duration", "");
    c.sample_interval = get_field<double>(j, "sample_interval", "");
    if (j.contains("analysis"))
        c.window_fraction =
            get_or<double>(j.at("analysis"), "window_fraction", "analysis.", c.window_fraction);
    return c;
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::validation, "cannot read scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, "scenario file '" + path + "': " + e.what());
    }
    return parse_scenario(j);
}

inline nlohmann::json to_json(const ScenarioConfig& c)
{
    nlohmann::json j;
    j["schema"] = c.schema;
    j["name"] = c.name;
    j["seed"] = c.seed;
    nlohmann::json osc;
    osc["count"] = c.count;
    if (c.frequencies) {
        osc["frequencies"] = *c.frequencies;
    } else if (c.periods) {
        nlohmann::json pd{{"kind", "normal"}, {"mean", c.periods->mean}, {"sd", c.periods->sd}};
        if (c.periods->max_ratio)
            pd["max_pairwise_ratio"] = *c.periods->max_ratio;
        else
            pd["max_pairwise_ratio"] = "rho_c";
        osc["period_distribution"] = pd;
    }
    if (c.initial_phases)
        osc["initial_phases"] = *c.initial_phases;
    else
        osc["initial_phases"] = {{"uniform", {c.phase_range.first, c.phase_range.second}}};
    j["oscillators"] = osc;
    nlohmann::json topo{{"kind", c.topology.kind}};
    if (c.topology.kind == "erdos_renyi")
        topo["p"] = c.topology.p;
    if (c.topology.kind == "edges")
        topo["edges"] = c.topology.edges;
    j["topology"] = topo;
    if (c.interaction.family == "smooth_log")
        j["interaction"] = {{"family", "smooth_log"}, {"gain", c.interaction.gain}};
    else
        j["interaction"] = {{"family", c.interaction.family},
                            {"tau", c.interaction.tau},
                            {"beta", c.interaction.beta}};
    nlohmann::json delays{{"uniform", c.uniform_delay}};
    if (!c.edge_delays.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [a, b, d] : c.edge_delays)
            rows.push_back({a, b, d});
        delays["per_edge"] = rows;
    }
    j["delays"] = delays;
    j["duration"] = c.duration;
    j["sample_interval"] = c.sample_interval;
    j["analysis"] = {{"window_fraction", c.window_fraction}};
    return j;
}

/// A scenario with every random quantity drawn and every cross-reference
/// checked.
struct Scenario {
    std::string name;
    NetworkTopology topology;
    std::vector<OscillatorConfig> oscillators;
    Interaction interaction;
    double duration;
    double sample_interval;
    double window;
};

/// Draws periods until the fastest/slowest frequency ratio is below the
/// bound. Returns frequencies.
inline std::vector<double> sample_frequencies(std::size_t n, const PeriodDistribution& dist,
                                              double max_ratio, std::uint64_t seed)
{
    RandomStream rng(seed, "frequencies");
    constexpr int max_attempts = 100000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> freq(n);
        bool ok = true;
        for (auto& w : freq) {
            double period = rng.normal(dist.mean, dist.sd);
            ok = ok && period > 0.0;
            w = 1.0 / period;
        }
        if (!ok)
            continue;
        auto [lo, hi] = std::minmax_element(freq.begin(), freq.end());
        if (*hi / *lo < max_ratio)
            return freq;
    }
    fail(ErrorKind::validation,
         "oscillators.period_distribution: no draw satisfied the pairwise ratio bound");
}

inline Scenario build_scenario(const ScenarioConfig& c)
{
    using detail::invalid_field;
    if (!(c.duration > 0.0) || !std::isfinite(c.duration))
        invalid_field("duration", "must be positive");
    if (!(c.sample_interval > 0.0) || !std::isfinite(c.sample_interval))
        invalid_field("sample_interval", "must be positive");
    if (!(c.window_fraction > 0.0 && c.window_fraction < 1.0))
        invalid_field("analysis.window_fraction", "must lie in (0,1)");

    Interaction f = [&]() -> Interaction {
        try {
            return c.interaction.build();
        } catch (const Error& e) {
            invalid_field("interaction", e.what());
        }
    }();

    const std::size_t n = c.count;
    std::vector<double> freq;
    if (c.frequencies) {
        freq = *c.frequencies;
        if (freq.size() != n)
            invalid_field("oscillators.frequencies", "expected " + std::to_string(n) + " values");
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(freq[i]) || freq[i] <= 0.0) {
                std::ostringstream os;
                os << "oscillator " << i << " has frequency " << freq[i] << "; must be positive";
                invalid_field("oscillators.frequencies[" + std::to_string(i) + "]", os.str());
            }
    } else {
        const auto& dist = *c.periods;
        if (!(dist.mean > 0.0) || !(dist.sd >= 0.0))
            invalid_field("oscillators.period_distribution", "mean must be positive, sd non-negative");
        double bound = dist.max_ratio ? *dist.max_ratio : critical_ratio(f, 1e-6).rho_c;
        if (!(bound > 1.0))
            invalid_field("oscillators.period_distribution.max_pairwise_ratio", "must exceed 1");
        freq = sample_frequencies(n, dist, bound, c.seed);
    }

    std::vector<double> phases;
    if (c.initial_phases) {
        phases = *c.initial_phases;
        if (phases.size() != n)
            invalid_field("oscillators.initial_phases", "expected " + std::to_string(n) + " values");
        for (std::size_t i = 0; i < n; ++i)
            if (!(phases[i] >= 0.0 && phases[i] < 1.0))
                invalid_field("oscillators.initial_phases[" + std::to_string(i) + "]",
                              "phase must lie in [0,1)");
    } else {
        auto [lo, hi] = c.phase_range;
        if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
            invalid_field("oscillators.initial_phases.uniform", "range must satisfy 0 <= lo < hi <= 1");
        RandomStream rng(c.seed, "initial_phases");
        for (std::size_t i = 0; i < n; ++i)
            phases.push_back(rng.uniform(lo, hi));
    }

    auto check_delay = [](double d, const std::string& field) {
        if (!std::isfinite(d) || d < 0.0 || d >= max_delay) {
            std::ostringstream os;
            os << "delay " << d << " violates the delay cap: delays must lie in [0, " << max_delay
               << ")";
            invalid_field(field, os.str());
        }
    };
    check_delay(c.uniform_delay, "delays.uniform");

    std::vector<Edge> edges;
    try {
        NetworkTopology base;
        if (c.topology.kind == "complete")
            base = complete_graph(n, c.uniform_delay);
        else if (c.topology.kind == "ring")
            base = ring_graph(n, c.uniform_delay);
        else if (c.topology.kind == "erdos_renyi")
            base = erdos_renyi_graph(n, c.topology.p, c.seed, c.uniform_delay);
        else if (c.topology.kind == "edges") {
            std::vector<Edge> raw;
            for (auto [a, b] : c.topology.edges)
                raw.push_back({a, b, c.uniform_delay});
            base = NetworkTopology(n, raw);
        } else {
            invalid_field("topology.kind", "unknown generator '" + c.topology.kind + "'");
        }
        edges = base.edges();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::validation && std::string(e.what()).rfind("topology", 0) == 0)
            throw;
        invalid_field("topology", e.what());
    }
    for (const auto& [a, b, d] : c.edge_delays) {
        std::string field = "delays.per_edge[" + std::to_string(a) + "-" + std::to_string(b) + "]";
        check_delay(d, field);
        auto lo = std::min(a, b), hi = std::max(a, b);
        auto it = std::find_if(edges.begin(), edges.end(),
                               [&](const Edge& e) { return e.a == lo && e.b == hi; });
        if (it == edges.end())
            invalid_field(field, "no such edge in the topology");
        it->delay = d;
    }

    return Scenario{c.name,
                    NetworkTopology(n, std::move(edges)),
                    make_oscillators(freq, phases),
                    f,
                    c.duration,
                    c.sample_interval,
                    c.window_fraction * c.duration};
}

struct SimulationResult {
    Scenario scenario;
    EventTrace trace;
    OrderParameterSeries order;
    DesyncVerdict verdict;
    std::optional<LimitCycle> limit_cycle;
    double window_mean_order = 0.0;
};

inline SimulationResult simulate(const Scenario& s, RunLimits limits = {})
{
    Simulator<Interaction> sim(s.topology, s.oscillators, s.interaction);
    SimulationResult r{s, sim.run(s.duration, s.sample_interval, limits), {}, {}, {}, 0.0};
    r.order = order_parameter_series(r.trace);
    const double from = s.duration - s.window;
    r.window_mean_order = mean_order_parameter(r.order, from);
    r.verdict = local_desync(r.trace, s.topology, s.window);
    auto fires = firing_sequence(r.trace);
    r.limit_cycle = detect_limit_cycle(firings_in_window(fires, from), limit_cycle_tolerance_default);
    return r;
}

// ---------------------------------------------------------------------------
// Presets: five globally coupled oscillators from near-synchronous phases.

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"fig5a", "fig5b", "fig5c", "fig5d"};
    return names;
}

inline constexpr std::uint64_t preset_seed = 42;
inline constexpr double preset_delay = 0.01;
inline constexpr double preset_cubic_beta = 0.75;

inline ScenarioConfig preset_config(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    c.seed = preset_seed;
    c.count = 5;
    c.phase_range = {0.0, 0.01};
    c.topology.kind = "complete";
    c.duration = 200.0;
    c.sample_interval = 0.02;

    const bool heterogeneous = name == "fig5b" || name == "fig5d";
    const bool delayed = name == "fig5c" || name == "fig5d";
    if (name != "fig5a" && !heterogeneous && !delayed)
        fail(ErrorKind::validation, "unknown preset '" + name + "'");

    if (heterogeneous)
        c.periods = PeriodDistribution{1.0, 0.05, std::nullopt};
    else
        c.frequencies = std::vector<double>(c.count, 1.0);

    if (delayed) {
        c.uniform_delay = preset_delay;
        c.interaction = {"shifted_cubic", 2.0, preset_delay, preset_cubic_beta};
    } else {
        c.interaction = {"smooth_log", 2.0, 0.1, 0.5};
    }
    return c;
}

inline SimulationResult run_preset(const std::string& name)
{
    return simulate(build_scenario(preset_config(name)));
}

}  // namespace desync
