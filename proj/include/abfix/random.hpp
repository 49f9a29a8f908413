#pragma once

#include <cstdint>
#include <random>

namespace abfix {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so the uniform helpers below are hand-rolled to keep reports bit-identical
// across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform index in [0, n); n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

} // namespace abfix
