#pragma once

#include <cstdint>
#include <random>

namespace sdnsync {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent seeds from (seed, salt).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Named substreams fanned out from one replica seed.
enum class Stream : std::uint64_t {
    Topology = 1,
    Dynamics = 2,
    Exploration = 3,
    WeightInit = 4,
    Baseline = 5,
    Replay = 6,
};

constexpr std::uint64_t substream_seed(std::uint64_t master, Stream s) noexcept {
    return mix_seed(master, static_cast<std::uint64_t>(s));
}

/// Uniform double in [0, 1) built from the top 53 bits; stable across
/// standard library implementations, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace sdnsync
