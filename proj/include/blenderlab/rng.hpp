#pragma once

#include <cstdint>

namespace blenderlab {

// Linear congruential generator with fixed constants (Knuth MMIX multiplier).
// Every random choice in the project goes through one of these, seeded
// explicitly, so runs are reproducible across platforms and worker counts.
struct Lcg {
    std::uint64_t state;

    explicit Lcg(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state(seed) {}

    std::uint64_t next_u64() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state;
    }
    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1p-53;
    }
    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
    // Uniform integer in [0, n); uses the high bits (the low bits of a
    // power-of-two-modulus LCG have short cycles).
    std::uint64_t next_below(std::uint64_t n) { return (next_u64() >> 33) % n; }
};

// Stable seed mixing for per-task generators (worker-count independent).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return x;
}

}  // namespace blenderlab
