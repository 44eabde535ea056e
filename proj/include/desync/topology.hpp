#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "desync/error.hpp"
#include "desync/rng.hpp"

namespace desync {

/// Propagation delays must stay below half a period.
inline constexpr double max_delay = 0.5;

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double delay = 0.0;
};

/// Undirected graph with a propagation delay on each edge.
class NetworkTopology {
public:
    NetworkTopology() = default;

    /// Validates: no self-loops, no duplicates, indices < n, delays in
    /// [0, max_delay).
    NetworkTopology(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges))
    {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (auto& e : edges_) {
            if (e.a >= n_ || e.b >= n_) {
                std::ostringstream os;
                os << "edge " << e.a << "-" << e.b << " references an oscillator >= " << n_;
                fail(ErrorKind::validation, os.str());
            }
            if (e.a == e.b) {
                std::ostringstream os;
                os << "self-loop on oscillator " << e.a;
                fail(ErrorKind::validation, os.str());
            }
            if (e.a > e.b)
                std::swap(e.a, e.b);
            if (!seen.insert({e.a, e.b}).second) {
                std::ostringstream os;
                os << "duplicate edge " << e.a << "-" << e.b;
                fail(ErrorKind::validation, os.str());
            }
            if (!std::isfinite(e.delay) || e.delay < 0.0 || e.delay >= max_delay) {
                std::ostringstream os;
                os << "delay " << e.delay << " on edge " << e.a << "-" << e.b
                   << " outside [0, " << max_delay << ")";
                fail(ErrorKind::validation, os.str());
            }
        }
        adjacency_.assign(n_, {});
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            adjacency_[edges_[i].a].push_back({edges_[i].b, edges_[i].delay});
            adjacency_[edges_[i].b].push_back({edges_[i].a, edges_[i].delay});
        }
        for (auto& nb : adjacency_)
            std::sort(nb.begin(), nb.end(),
                      [](const Neighbour& x, const Neighbour& y) { return x.id < y.id; });
    }

    struct Neighbour {
        std::size_t id;
        double delay;
    };

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Neighbour>& neighbours(std::size_t i) const { return adjacency_.at(i); }
    std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }

    bool connected(std::size_t i, std::size_t j) const
    {
        const auto& nb = adjacency_.at(i);
        return std::any_of(nb.begin(), nb.end(), [j](const Neighbour& x) { return x.id == j; });
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbour>> adjacency_;
};

inline NetworkTopology complete_graph(std::size_t n, double delay = 0.0)
{
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({i, j, delay});
    return NetworkTopology(n, std::move(edges));
}

inline NetworkTopology ring_graph(std::size_t n, double delay = 0.0)
{
    std::vector<Edge> edges;
    if (n == 2)
        edges.push_back({0, 1, delay});
    else if (n > 2)
        for (std::size_t i = 0; i < n; ++i)
            edges.push_back({i, (i + 1) % n, delay});
    return NetworkTopology(n, std::move(edges));
}

inline NetworkTopology erdos_renyi_graph(std::size_t n, double p, std::uint64_t seed,
                                         double delay = 0.0)
{
    if (!(p >= 0.0 && p <= 1.0))
        fail(ErrorKind::validation, "erdos_renyi probability must lie in [0,1]");
    RandomStream rng(seed, "topology");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p)
                edges.push_back({i, j, delay});
    return NetworkTopology(n, std::move(edges));
}

}  // namespace desync
