#pragma once

#include <cstdint>
#include <random>

namespace occ {

// All randomness in the project flows from a single 64-bit seed through
// named substreams: substream(seed, index) yields an engine whose draws do
// not depend on how work is split across threads.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for substream `stream` of master seed `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s0 = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    std::uint64_t s1 = splitmix64(stream ^ 0x14057b7ef767814fULL);
    std::seed_seq seq{static_cast<unsigned>(s0), static_cast<unsigned>(s0 >> 32),
                      static_cast<unsigned>(s1), static_cast<unsigned>(s1 >> 32)};
    return std::mt19937_64(seq);
}

inline long long binomial_draw(std::mt19937_64& gen, long long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<long long> dist(n, p);
    return dist(gen);
}

}  // namespace occ
