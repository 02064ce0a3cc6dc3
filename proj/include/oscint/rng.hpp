#pragma once

#include <cstdint>
#include <cmath>

namespace oscint {

// Counter-based deterministic RNG. All experiment sampling goes through this
// so that a (seed, index) pair reproduces the same draw on any platform,
// independent of standard-library distribution internals.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mix a master seed with stream/index counters into an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ (stream * 0x9e3779b97f4a7c15ULL + 0xd1342543de82ef95ULL));
    h = splitmix64(h ^ (index * 0xa0761d6478bd642fULL + 1));
    return h;
}

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift rejection-free mapping; bias < 2^-64, irrelevant here
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next_u64() & 1) != 0; }

    /// Log-uniform magnitude over the given number of decades, centred at 1.
    double log_uniform_magnitude(double decades) {
        return std::pow(10.0, uniform(-decades / 2.0, decades / 2.0));
    }
};

}
