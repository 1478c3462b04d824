#pragma once

#include <cstdint>
#include <random>

namespace dimerloops {

// Independent streams are derived from (seed, stream); chain parallelism uses
// one stream per chain so merged results do not depend on scheduling.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Exact uniform draw from {0, .., n-1} by rejection; avoids the
// implementation-defined layout of std::uniform_int_distribution.
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n)
{
    const std::uint64_t reject_below = (-n) % n; // 2^64 mod n
    for (;;) {
        std::uint64_t r = g();
        if (r >= reject_below) return r % n;
    }
}

inline double uniform01(std::mt19937_64& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

} // namespace dimerloops
