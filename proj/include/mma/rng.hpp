#ifndef MMA_RNG_HPP
#define MMA_RNG_HPP

#include <cstdint>

namespace mma {

// splitmix64: tiny, fast, and identical on every platform, which keeps
// seeded test data and --seed CLI output byte-reproducible.
struct SplitMix64 {
    uint64_t state = 0x9E3779B97F4A7C15ull;

    explicit SplitMix64(uint64_t seed = 0) : state(seed + 0x9E3779B97F4A7C15ull) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint32_t next_u32() { return (uint32_t)(next() >> 32); }

    // Uniform in [0, bound).
    uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }

    // Uniform integer in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + (int64_t)below((uint64_t)(hi - lo) + 1);
    }

    // Uniform real in [0, 1).
    double unit() { return (double)(next() >> 11) * 0x1.0p-53; }

    // Uniform real in [-1, 1).
    double symmetric() { return unit() * 2.0 - 1.0; }
};

} // namespace mma

#endif
