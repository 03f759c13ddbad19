#pragma once

#include <cstdint>
#include <random>

namespace muqmc {

using Rng = std::mt19937_64;

// Uniform double in the open interval (0,1). Avoids the std distributions,
// whose output is implementation-defined, and avoids exact 0/1 so inverse-CDF
// transforms never hit infinite branches.
inline double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Derives an independent sub-stream seed from (base, tag). SplitMix64 finalizer.
inline std::uint64_t seed_mix(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace muqmc
