#pragma once

#include <cstdint>

namespace wavekin {

// Counter-based generator: every drawn number is a pure function of
// (seed, stream, counter), so realization r / lattice site s always sees the
// same phase no matter how work is scheduled across threads.
//
// Mixing function is the splitmix64 finalizer applied to a combined key.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ull);
    h = mix64(h ^ stream);
    h = mix64(h ^ counter);
    return h;
}

// uniform in [0,1)
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
    return static_cast<double>(counter_hash(seed, stream, counter) >> 11) *
           0x1.0p-53;
}

}  // namespace wavekin
