#pragma once

#include <cmath>
#include <cstdint>

namespace riemfpp {

/// SplitMix64. Used both as a fast generator and to derive independent
/// child seeds from (base seed, counter) without any sequential coupling.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in (0, 1]
    double next_unit() { return double((next() >> 11) + 1) * 0x1.0p-53; }
};

/// Counter-based seed derivation: replicate seeds depend only on
/// (base, stream, counter), never on execution order.
inline uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t counter) {
    SplitMix64 s(base ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    uint64_t a = s.next();
    SplitMix64 t(a + counter * 0xd1342543de82ef95ULL);
    t.next();
    return t.next();
}

/// xoshiro256** seeded via SplitMix64; the workhorse generator.
struct Xoshiro256 {
    uint64_t s[4];

    explicit Xoshiro256(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& v : s) v = sm.next();
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t next() {
        uint64_t result = rotl(s[1] * 5, 7) * 9;
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    /// uniform in (0, 1]
    double next_unit() { return double((next() >> 11) + 1) * 0x1.0p-53; }

    /// uniform in [0, 1)
    double next_unit_open() { return double(next() >> 11) * 0x1.0p-53; }

    /// uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit_open(); }

    /// uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }

    /// Standard normal via Box-Muller (cosine branch only, so the draw count
    /// per variate is fixed and results stay reproducible everywhere).
    double normal() {
        double u1 = next_unit();
        double u2 = next_unit_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

}  // namespace riemfpp
