#pragma once

#include <cstdint>

namespace attcoh::rng {

// splitmix64 finalizer. Chained over the counters below it gives each
// (seed, space, agent, stimulus) tuple its own well-mixed 64-bit stream,
// so draws are a pure function of the tuple and independent of loop order
// or thread schedule.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t space,
                                 std::uint64_t agent, std::uint64_t stimulus) {
    std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
    h = mix64(h ^ space);
    h = mix64(h ^ agent);
    h = mix64(h ^ stimulus);
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t seed, std::uint64_t space,
                        std::uint64_t agent, std::uint64_t stimulus) {
    return static_cast<double>(counter_key(seed, space, agent, stimulus) >> 11) * 0x1.0p-53;
}

} // namespace attcoh::rng
