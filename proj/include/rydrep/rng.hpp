#pragma once

#include <cstdint>
#include <random>

namespace rydrep {

using Rng = std::mt19937_64;

// splitmix64 step; used to decorrelate (seed, stream) pairs before seeding
// the main generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derived stream for trial j of a run with seed s.  Every trial owns its own
// generator, so results are independent of how trials are distributed over
// worker threads.
inline Rng make_trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return Rng(splitmix64(splitmix64(seed) ^ (trial + 1)));
}

// Canonical uniform double in [0, 1): top 53 bits of one 64-bit draw.  Used
// instead of std::uniform_real_distribution so the draw sequence is fixed by
// this header, not by the standard library implementation.
inline double next_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    return next_unit(rng) < p;
}

}  // namespace rydrep
