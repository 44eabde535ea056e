#pragma once

// Seeded random streams. Every random quantity in a run is drawn from a named
// sub-stream of one base seed, so changing how many values one consumer draws
// never perturbs another. Draws are built directly on mt19937_64 output
// because the standard distributions are not specified bit-for-bit across
// library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace desync {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a; stable stream labels independent of std::hash.
inline std::uint64_t label_hash(std::string_view label) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    RandomStream(std::uint64_t seed, std::string_view label)
        : engine_(splitmix64(seed ^ splitmix64(label_hash(label)))) {}

    RandomStream(std::uint64_t seed, std::string_view label, std::uint64_t index)
        : engine_(splitmix64(seed ^ splitmix64(label_hash(label) + splitmix64(index)))) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by the Box-Muller transform (one value per call).
    double normal(double mean, double sd)
    {
        double u1 = 1.0 - uniform();  // (0,1]
        double u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace desync
